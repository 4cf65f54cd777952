"""Desk-scale verification of the SAT-to-scheduling reduction.

Maps small CNF formulas to abstract gain-matrix scheduling instances,
checks the closed-form lemma conditions, and compares the brute-force
scheduling decision against a brute-force SAT oracle.  The satisfiable
instances decide correctly; the unsatisfiable desk-scale family exposes a
genuine gap in the construction (a schedule with fewer than M literals
can still carry every clause user), which the comparison makes visible.
"""

from jsdm.hardness import (CnfFormula, brute_force_decision, build_instance,
                           evaluate, feasible_params, lemma_conditions,
                           sat_brute_force)

FORMULAS = [
    ("satisfiable", CnfFormula(2, [[1, 2], [-1, -2]])),
    ("satisfiable", CnfFormula(3, [[1, 2], [-1, 3], [-2, -3]])),
    ("unsatisfiable", CnfFormula(2, [[1], [-1, 2], [-2]])),
]

delta = 0.05
for label, formula in FORMULAS:
    rho, beta = feasible_params(formula.num_vars, formula.num_clauses, delta)
    lemmas = lemma_conditions(rho, beta, delta, formula.num_vars,
                              formula.num_clauses)
    instance = build_instance(formula, rho, beta, delta)
    best, gamma, decision = brute_force_decision(instance)
    truth = sat_brute_force(formula)
    print(f"{label}: clauses {formula.clauses}")
    print(f"  rho={rho:.3f} beta={beta:.3f} delta={delta}  lemmas={lemmas}")
    print(f"  max feasible objective {best:.4f} vs gamma {gamma:.4f} "
          f"-> decision {decision}, SAT oracle {truth} "
          f"({'agree' if decision == truth else 'DISAGREE'})")
    if decision != truth:
        # exhibit the cheat: one literal plus every clause user
        m = formula.num_vars
        cheat = [0] + list(range(2 * m, 2 * m + formula.num_clauses))
        objective, feasible = evaluate(instance, cheat)
        print(f"  cheat schedule {cheat} (1 literal + all clauses): "
              f"feasible={feasible}, objective={objective:.4f} > gamma")
    print()
