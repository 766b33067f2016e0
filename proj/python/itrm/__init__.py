"""Transfinite register machine workbench.

Thin python surface over the C++ core: ordinal arithmetic in Cantor normal
form, the assembler and program numbering, reals-as-oracles, the transfinite
engine and its reference twin, and the analysis reports.
"""

from itrm._core import (  # noqa: F401
    Budget,
    Ordinal,
    Oracle,
    Program,
    autoreduction_check,
    bounded_halting,
    compute_real,
    decidability_probe,
    detect_certificate,
    enumerate_bounded,
    jump_approx,
    oracle_from_spec,
    pad_program,
    parse_program,
    program_of,
    program_oracle,
    recognizability_probe,
    run,
    run_naive,
    run_on_input,
    strong_autoreduction_check,
    verify_certificate,
    cantor_pair,
    cantor_unpair,
)

__all__ = [
    "Budget",
    "Ordinal",
    "Oracle",
    "Program",
    "autoreduction_check",
    "bounded_halting",
    "cantor_pair",
    "cantor_unpair",
    "compute_real",
    "decidability_probe",
    "detect_certificate",
    "enumerate_bounded",
    "jump_approx",
    "oracle_from_spec",
    "pad_program",
    "parse_program",
    "program_of",
    "program_oracle",
    "recognizability_probe",
    "run",
    "run_naive",
    "run_on_input",
    "strong_autoreduction_check",
    "verify_certificate",
]
