#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "itrm/analysis.hpp"
#include "itrm/corpus.hpp"
#include "itrm/engine.hpp"

namespace py = pybind11;
using namespace itrm;

namespace {

Nat nat_from_py(const py::int_& v) {
  std::string s = py::str(v);
  if (!s.empty() && s[0] == '-') throw py::value_error("naturals must be >= 0");
  return Nat(s, 10);
}

py::int_ nat_to_py(const Nat& n) { return py::int_(py::str(n.get_str())); }

py::dict verdict_to_dict(const Verdict& v) {
  py::dict d;
  switch (v.kind) {
    case Verdict::Kind::Halt:
      d["kind"] = "halt";
      d["out"] = nat_to_py(v.output);
      d["time"] = print_cnf(v.time);
      break;
    case Verdict::Kind::Diverge:
      d["kind"] = "diverge";
      d["level"] = v.certificate ? v.certificate->level : 0;
      if (v.certificate) d["certificate"] = py::cast(*v.certificate);
      break;
    case Verdict::Kind::BudgetExceeded:
      d["kind"] = "budget";
      d["reason"] = budget_reason_name(v.reason);
      break;
  }
  return d;
}

py::dict run_with(const Program& p, const Oracle& x, const Budget& b,
                  const py::int_& input, bool want_trace, bool naive) {
  std::string trace;
  TraceFn sink;
  if (want_trace)
    sink = [&trace](const std::string& rec) {
      trace += rec;
      trace += '\n';
    };
  Verdict v;
  if (naive) {
    if (!input.equal(py::int_(0)))
      throw py::value_error("run_naive binds input 0 only");
    v = run_naive(p, x, b, sink);
  } else {
    v = run_on_input(p, x, nat_from_py(input), b, sink);
  }
  py::dict d = verdict_to_dict(v);
  if (want_trace) d["trace"] = trace;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "transfinite register machine workbench";

  py::register_exception<AsmError>(m, "AsmError");
  py::register_exception<OrdinalError>(m, "OrdinalError");
  py::register_exception<OracleSpecError>(m, "OracleSpecError");
  py::register_exception<OracleBitError>(m, "OracleBitError");

  py::class_<Ordinal>(m, "Ordinal")
      .def(py::init([](const std::string& text) { return parse_cnf(text); }),
           py::arg("cnf"))
      .def_static(
          "from_int",
          [](const py::int_& n) { return Ordinal::from_nat(nat_from_py(n)); })
      .def_static("omega", &Ordinal::omega)
      .def("__str__", [](const Ordinal& a) { return print_cnf(a); })
      .def("__repr__",
           [](const Ordinal& a) { return "Ordinal('" + print_cnf(a) + "')"; })
      .def("__eq__", [](const Ordinal& a, const Ordinal& b) { return a == b; })
      .def("__lt__", [](const Ordinal& a, const Ordinal& b) { return a < b; })
      .def("__le__", [](const Ordinal& a, const Ordinal& b) { return a <= b; })
      .def("__add__", [](const Ordinal& a, const Ordinal& b) { return add(a, b); })
      .def("is_limit", &Ordinal::is_limit)
      .def("is_finite", &Ordinal::is_finite)
      .def("successor", [](const Ordinal& a) { return successor(a); })
      .def("times_omega", [](const Ordinal& a) { return times_omega(a); });

  py::class_<Budget>(m, "Budget")
      .def(py::init([](std::uint64_t steps, std::uint64_t limits,
                       std::uint64_t nesting, std::uint64_t period) {
             Budget b;
             b.max_successor_steps = steps;
             b.max_limit_events = limits;
             b.max_nesting_level = nesting;
             b.max_period = period;
             return b;
           }),
           py::arg("steps") = Budget{}.max_successor_steps,
           py::arg("limits") = Budget{}.max_limit_events,
           py::arg("nesting") = Budget{}.max_nesting_level,
           py::arg("period") = Budget{}.max_period)
      .def_readwrite("steps", &Budget::max_successor_steps)
      .def_readwrite("limits", &Budget::max_limit_events)
      .def_readwrite("nesting", &Budget::max_nesting_level)
      .def_readwrite("period", &Budget::max_period);

  py::class_<Program>(m, "Program")
      .def_property_readonly("register_count",
                             [](const Program& p) { return p.register_count; })
      .def("__len__", [](const Program& p) { return p.size(); })
      .def("text", [](const Program& p) { return print_program(p); })
      .def("index", [](const Program& p) { return nat_to_py(index_of(p)); })
      .def("__eq__", [](const Program& a, const Program& b) { return a == b; })
      .def("__repr__", [](const Program& p) {
        return "Program(" + std::to_string(p.size()) + " lines)";
      });

  m.def("parse_program",
        [](const std::string& text) { return parse_program(text); });
  m.def("program_of",
        [](const py::int_& index) { return program_of(nat_from_py(index)); });
  m.def("enumerate_bounded", [](std::uint64_t max_registers, std::size_t count) {
    return enumerate_bounded(max_registers, count);
  });
  m.def("pad_program", &pad_program);

  py::class_<Oracle>(m, "Oracle")
      .def_static("zeros", &Oracle::zeros)
      .def_static("ones", &Oracle::ones)
      .def_static("finite", &Oracle::finite)
      .def_static("periodic", &Oracle::periodic)
      .def_static("join", &Oracle::join)
      .def_static("flip",
                  [](const Oracle& x, const py::int_& i) {
                    return Oracle::flip(x, nat_from_py(i));
                  })
      .def_static("delete_bit",
                  [](const Oracle& x, const py::int_& n) {
                    return Oracle::delete_bit(x, nat_from_py(n));
                  })
      .def_static("delete_bits",
                  [](const Oracle& x, const std::vector<std::uint64_t>& positions) {
                    std::vector<Nat> nats;
                    for (std::uint64_t p : positions) nats.push_back(nat(p));
                    return Oracle::delete_bits(x, std::move(nats));
                  })
      .def_static("product_code", &Oracle::product_code)
      .def("split", &Oracle::split)
      .def("bit",
           [](const Oracle& x, const py::int_& n) {
             return x.require_bit(nat_from_py(n));
           })
      .def("spec", [](const Oracle& x) { return x.spec(); })
      .def("backing_runs", &Oracle::backing_runs)
      .def("__repr__",
           [](const Oracle& x) { return "Oracle('" + x.spec() + "')"; });

  m.def("oracle_from_spec",
        [](const std::string& spec) { return oracle_from_spec(spec); });
  m.def("program_oracle",
        [](const Program& p, const Oracle& base, const Budget& per_bit) {
          return make_program_oracle(p, base, per_bit);
        },
        py::arg("program"), py::arg("base"), py::arg("per_bit") = Budget{});

  py::class_<LoopCertificate>(m, "Certificate")
      .def_property_readonly("level",
                             [](const LoopCertificate& c) { return c.level; })
      .def_property_readonly(
          "start", [](const LoopCertificate& c) { return print_cnf(c.start); })
      .def_property_readonly(
          "period", [](const LoopCertificate& c) { return print_cnf(c.period); })
      .def_property_readonly("min_line",
                             [](const LoopCertificate& c) { return c.min_line; })
      .def("__repr__", [](const LoopCertificate& c) {
        return "Certificate(level=" + std::to_string(c.level) + ", start='" +
               print_cnf(c.start) + "', period='" + print_cnf(c.period) + "')";
      });

  m.def(
      "run",
      [](const Program& p, const Oracle& x, const Budget& b, const py::int_& input,
         bool trace) { return run_with(p, x, b, input, trace, false); },
      py::arg("program"), py::arg("oracle") = Oracle::zeros(),
      py::arg("budget") = Budget{}, py::arg("input") = py::int_(0),
      py::arg("trace") = false);
  m.def(
      "run_naive",
      [](const Program& p, const Oracle& x, const Budget& b, bool trace) {
        return run_with(p, x, b, py::int_(0), trace, true);
      },
      py::arg("program"), py::arg("oracle") = Oracle::zeros(),
      py::arg("budget") = Budget{}, py::arg("trace") = false);
  m.def(
      "run_on_input",
      [](const Program& p, const Oracle& x, const py::int_& input, const Budget& b,
         bool trace) { return run_with(p, x, b, input, trace, false); },
      py::arg("program"), py::arg("oracle"), py::arg("input"),
      py::arg("budget") = Budget{}, py::arg("trace") = false);

  m.def("verify_certificate", &verify_certificate, py::arg("program"),
        py::arg("oracle"), py::arg("certificate"));

  m.def(
      "detect_certificate",
      [](const Program& p,
         const std::vector<std::tuple<std::uint64_t, int, std::vector<std::uint64_t>>>&
             entries,
         const std::string& base, const Budget& b)
          -> std::optional<LoopCertificate> {
        StepTrace trace;
        trace.base = parse_cnf(base);
        for (const auto& [line, outcome, regs] : entries) {
          StepTrace::Entry e;
          e.line = line;
          e.outcome = static_cast<TestOutcome>(outcome);
          for (std::uint64_t r : regs) e.registers.push_back(nat(r));
          trace.entries.push_back(std::move(e));
        }
        return detect_lasso(p, trace, b);
      },
      py::arg("program"), py::arg("entries"), py::arg("base") = "0",
      py::arg("budget") = Budget{});

  m.def(
      "compute_real",
      [](const Program& p, const Oracle& x, std::uint64_t n_bits, const Budget& b) {
        RealComputation rc = compute_real(p, x, n_bits, b);
        py::list out;
        for (const auto& e : rc.entries) {
          switch (e.status) {
            case RealComputation::Status::Bit0:
              out.append(py::int_(0));
              break;
            case RealComputation::Status::Bit1:
              out.append(py::int_(1));
              break;
            case RealComputation::Status::NonBoolean:
              out.append(py::str("non-boolean"));
              break;
            case RealComputation::Status::Diverges:
              out.append(py::str("diverges"));
              break;
            case RealComputation::Status::Budget:
              out.append(py::str("budget"));
              break;
          }
        }
        return out;
      },
      py::arg("program"), py::arg("oracle"), py::arg("n_bits"),
      py::arg("budget") = Budget{});

  m.def(
      "bounded_halting",
      [](std::uint64_t registers, const Oracle& x, std::uint64_t max_index,
         const Budget& b) { return to_jsonl(bounded_halting(registers, x, max_index, b)); },
      py::arg("registers"), py::arg("oracle"), py::arg("max_index"),
      py::arg("budget") = Budget{});
  m.def(
      "jump_approx",
      [](const Oracle& x, std::uint64_t max_index, const Budget& b) {
        return to_jsonl(jump_approx(x, max_index, b));
      },
      py::arg("oracle"), py::arg("max_index"), py::arg("budget") = Budget{});
  m.def(
      "autoreduction_check",
      [](const Program& p, const Oracle& x, std::uint64_t n_bits, const Budget& b) {
        AutoreductionReport r = autoreduction_check(p, x, n_bits, b);
        py::dict d;
        d["lines"] = to_jsonl(r);
        d["all_match"] = r.all_match();
        return d;
      },
      py::arg("program"), py::arg("oracle"), py::arg("bits"),
      py::arg("budget") = Budget{});
  m.def(
      "strong_autoreduction_check",
      [](const Program& p, const Oracle& x, const std::vector<std::uint64_t>& s,
         const Budget& b) {
        AutoreductionReport r = strong_autoreduction_check(p, x, s, b);
        py::dict d;
        d["lines"] = to_jsonl(r);
        d["all_match"] = r.all_match();
        return d;
      },
      py::arg("program"), py::arg("oracle"), py::arg("positions"),
      py::arg("budget") = Budget{});

  m.def(
      "recognizability_probe",
      [](const Program& q, const std::vector<Oracle>& candidates, const Budget& b) {
        RecognizabilityReport r = recognizability_probe(q, candidates, b);
        py::list out;
        for (const auto& e : r.entries) {
          py::dict d;
          d["oracle"] = e.oracle_spec;
          d["outcome"] = probe_outcome_name(e.outcome);
          out.append(d);
        }
        return out;
      },
      py::arg("program"), py::arg("candidates"), py::arg("budget") = Budget{});
  m.def(
      "decidability_probe",
      [](const Program& p, const std::vector<Oracle>& battery, const Budget& b) {
        DecidabilityReport r = decidability_probe(p, battery, b);
        py::dict d;
        d["deciding_on_sample"] = r.deciding_on_sample;
        d["in_set"] = r.in_set;
        d["out_set"] = r.out_set;
        py::list entries;
        for (const auto& e : r.entries) {
          py::dict ed;
          ed["oracle"] = e.oracle_spec;
          ed["outcome"] = probe_outcome_name(e.outcome);
          entries.append(ed);
        }
        d["entries"] = entries;
        return d;
      },
      py::arg("program"), py::arg("battery"), py::arg("budget") = Budget{});

  m.def("cantor_pair", [](const py::int_& i, const py::int_& j) {
    return nat_to_py(cantor_pair(nat_from_py(i), nat_from_py(j)));
  });
  m.def("cantor_unpair", [](const py::int_& k) {
    auto [i, j] = cantor_unpair(nat_from_py(k));
    return py::make_tuple(nat_to_py(i), nat_to_py(j));
  });
}
