#!/usr/bin/env python3
"""Smoke tests for the evtw python module."""

import math
import sys

import evtw

failures = 0


def check(name, cond, extra=""):
    global failures
    print(("ok   " if cond else "FAIL ") + name + (" " + extra if extra else ""))
    if not cond:
        failures += 1


# models
m = evtw.TailModel.parse("hall:C=1,gamma=0.5,rho=-1,d=1")
check("parse/tag", m.tag == "hall:C=1,gamma=0.5,rho=-1,d=1")
check("gamma/rho", m.gamma == 0.5 and m.rho == -1.0)
check("tail_quantile", abs(evtw.parse_model("pareto:alpha=2").tail_quantile(4.0) - 2.0) < 1e-12)
check("second_order_A", abs(m.second_order_A(10.0) + 0.1 / 1.1) < 1e-12)

s1 = m.sample(1000, 42)
s2 = m.sample(1000, 42)
check("sampling deterministic", s1 == s2)
check("sampling sorted", s1 == sorted(s1))

try:
    evtw.parse_model("pareto:alfa=2")
    check("bad spec raises", False)
except ValueError as e:
    check("bad spec raises", "alpha" in str(e))

# Wasserstein
check("wp sorted matching", abs(evtw.wp_empirical([1, 2], [3, 5], 1.0) - 2.5) < 1e-14)
check("winf log", abs(evtw.winf_empirical([1, 2], [1, 4], "log") - math.log(2)) < 1e-14)
w = evtw.wp_between_models(evtw.parse_model("pareto:alpha=1"),
                           evtw.parse_model("pareto:alpha=2"), 1.0, "log")
check("wp between models", abs(w - 0.5) < 1e-6, str(w))

# estimators
h = evtw.hill([1, 2, 4, 8], 2)
check("hill", abs(h["value"] - 1.5 * math.log(2)) < 1e-12)
wr = evtw.weissman([1.0, 2.0, 2 * math.exp(0.4), 2 * math.exp(0.6)], 2, 0.005)
check("weissman", abs(wr["value"] - 20.0) < 1e-10 and "ci" in wr)

# functionals
check("c_p", abs(evtw.c_p(-1.0, 1.0) - 0.5) < 1e-14)
check("bias_b", abs(evtw.bias_b(0.0) - 1.0) < 1e-14)
check("psi", abs(evtw.psi(0.5, -0.5, 4.0) + 2 * (math.log(4) - 2)) < 1e-10)
check("a_p zero on Pareto", evtw.a_p(evtw.parse_model("pareto:alpha=2"), 100.0, 1.0) < 1e-10)

# block maxima
check("block_maxima", evtw.block_maxima([1, 5, 2, 4, 3, 6], 2) == [4, 5, 6])

# experiments
names = [n for n, _ in evtw.list_experiments()]
check("registry", "coupling-identity" in names and len(names) == 8)
rep = evtw.run_experiment("pot-conditional", '{"reps": 100}')
check("experiment pass", rep["pass"] is True)
check("experiment schema", rep["schema_version"] == 1 and "checks" in rep)
rep2 = evtw.run_experiment("pot-conditional", '{"reps": 100}')
check("experiment deterministic", rep == rep2)

print(f"{failures} failures")
sys.exit(1 if failures else 0)
