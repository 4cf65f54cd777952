"""Executable SAT-to-scheduling reduction at desk scale.

An irreducible CNF formula over M variables and D clauses maps to an
abstract scheduling instance with 2M literal users and D clause users.
Diagonal gains are rho (literals) and beta (clauses); complementary
literals interfere with gain rho so they can never be scheduled together;
a literal user interferes a clause user with gain 1/M unless it is a
literal of that clause, and clause users push gain delta back onto
non-member literals.  SIR tolerances are set to their maximal admissible
values: 1 + (rho - D delta)/(D delta) for literals, beta + beta/(M-1) for
clauses, so that a clause user is schedulable exactly when one of its
literals is scheduled.

Under the three lemma conditions (checkable in closed form, and always
satisfiable via the constructive parameter recipe) the best feasible
schedule uses M literals and as many clauses as those literals allow, so
a threshold objective separates satisfiable from unsatisfiable formulas.
Everything here is small enough to verify by exhaustive enumeration.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractViolation, SizeCapError

BRUTE_FORCE_USER_CAP = 16
GAMMA_RELATIVE_BUMP = 1e-9
SIR_SLACK = 1e-9


@dataclass
class CnfFormula:
    """CNF over variables 1..num_vars; clauses hold signed integers."""

    num_vars: int
    clauses: list

    def __post_init__(self):
        self.clauses = [list(c) for c in self.clauses]
        seen_pos, seen_neg = set(), set()
        for clause in self.clauses:
            if not clause:
                raise ContractViolation("empty clause")
            lits = set(clause)
            for lit in lits:
                var = abs(lit)
                if lit == 0 or var > self.num_vars:
                    raise ContractViolation("literal %d out of range" % lit)
                (seen_pos if lit > 0 else seen_neg).add(var)
            if any(-lit in lits for lit in lits):
                raise ContractViolation(
                    "clause %s is trivially satisfied (contains a variable "
                    "and its complement)" % (sorted(lits),))
        for var in range(1, self.num_vars + 1):
            if var not in seen_pos or var not in seen_neg:
                raise ContractViolation(
                    "variable %d does not appear in both polarities; the "
                    "formula is reducible" % var)

    @property
    def num_clauses(self):
        return len(self.clauses)


def parse_dimacs(text):
    """DIMACS CNF: 'c' comments, one 'p cnf M D' header, clauses as
    0-terminated signed integers."""
    num_vars = None
    declared = None
    tokens = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ConfigError("malformed DIMACS header: %r" % line)
            num_vars, declared = int(parts[2]), int(parts[3])
            continue
        tokens.extend(int(t) for t in line.split())
    if num_vars is None:
        raise ConfigError("missing 'p cnf' header")
    clauses, current = [], []
    for t in tokens:
        if t == 0:
            if current:
                clauses.append(current)
                current = []
        else:
            current.append(t)
    if current:
        clauses.append(current)
    if declared is not None and declared != len(clauses):
        raise ConfigError("header declares %d clauses, found %d"
                          % (declared, len(clauses)))
    return CnfFormula(num_vars, clauses)


def format_dimacs(formula):
    lines = ["p cnf %d %d" % (formula.num_vars, formula.num_clauses)]
    for clause in formula.clauses:
        lines.append(" ".join(str(l) for l in clause) + " 0")
    return "\n".join(lines) + "\n"


@dataclass
class AbstractGainInstance:
    """Gain-matrix scheduling instance produced by the reduction.

    Users 0..M-1 are the positive literals, M..2M-1 the negated ones,
    2M..2M+D-1 the clauses.  gain[j, i] is the interference from user j
    onto user i; alpha[i] is user i's SIR tolerance.
    """

    formula: CnfFormula
    gain: np.ndarray
    alpha: np.ndarray
    rho: float
    beta: float
    delta: float
    eps1: float
    eps2: float

    @property
    def num_users(self):
        return self.gain.shape[0]

    @property
    def num_literal_users(self):
        return 2 * self.formula.num_vars

    def is_clause_user(self, i):
        return i >= self.num_literal_users


def build_instance(formula, rho, beta, delta):
    """Gain matrix and tolerances for one irreducible formula."""
    m, d = formula.num_vars, formula.num_clauses
    if m < 2:
        raise ConfigError("the clause tolerance bound beta/(M-1) needs M >= 2")
    if not d * delta < rho:
        raise ConfigError("need D*delta < rho (got D*delta=%g, rho=%g)"
                          % (d * delta, rho))
    if min(rho, beta, delta) <= 0:
        raise ConfigError("rho, beta, delta must be positive")

    n = 2 * m + d
    gain = np.zeros((n, n))
    for i in range(2 * m):
        gain[i, i] = rho
    for i in range(2 * m, n):
        gain[i, i] = beta
    for var in range(m):
        gain[var, m + var] = gain[m + var, var] = rho   # complement pair

    def literal_user(lit):
        return (lit - 1) if lit > 0 else (m + (-lit - 1))

    for ci, clause in enumerate(formula.clauses):
        cu = 2 * m + ci
        members = {literal_user(lit) for lit in clause}
        for lu in range(2 * m):
            if lu not in members:
                gain[lu, cu] = 1.0 / m     # literal -> clause
                gain[cu, lu] = delta       # clause -> literal

    eps1 = (rho - d * delta) / (d * delta)
    eps2 = beta / (m - 1)
    alpha = np.empty(n)
    alpha[:2 * m] = 1.0 + eps1
    alpha[2 * m:] = beta + eps2
    return AbstractGainInstance(formula, gain, alpha, rho, beta, delta, eps1, eps2)


def evaluate(instance, schedule):
    """Objective and feasibility of a user subset.

    Feasible iff every scheduled user i keeps G_ii / sum_j G_ji >= alpha_i
    over the scheduled interferers (empty sum passes).  The objective is
    the noise-inclusive sum rate sum_i log2(1 + G_ii / (1 + sum_j G_ji)).
    """
    sched = sorted(set(schedule))
    objective = 0.0
    feasible = True
    for i in sched:
        interference = sum(instance.gain[j, i] for j in sched if j != i)
        if interference > 0.0:
            sir = instance.gain[i, i] / interference
            if sir < instance.alpha[i] * (1.0 - SIR_SLACK):
                feasible = False
        objective += math.log2(1.0 + instance.gain[i, i] / (1.0 + interference))
    return objective, feasible


def lemma_conditions(rho, beta, delta, m, d):
    """The three closed-form sufficient conditions under which the
    objective is maximized by M literals plus all allowed clauses."""
    l1 = math.log2(1.0 + beta / (1.0 + (m - 1) / m)) \
        + m * math.log2(1.0 - rho * delta / ((1.0 + rho) * (1.0 + delta))) >= 0.0
    l2 = math.log2(1.0 + rho / (1.0 + (d - 1) * delta)) \
        + d * math.log2(1.0 - beta / ((beta + 1.0) * (m + 1.0))) >= 0.0
    l3 = m * math.log2((1.0 + rho + (d - 1) * delta)
                       / ((1.0 + (d - 1) * delta) * (1.0 + rho))) \
        + d * math.log2((beta * m + 2 * m - 1)
                        / (2 * m - 1 + beta * (2 * m - 1))) \
        + math.log2(1.0 + beta) >= 0.0
    return l1, l2, l3


def feasible_params(m, d, delta):
    """Constructive (rho, beta) making all three lemma conditions hold."""
    if m < 2:
        raise ConfigError("need M >= 2 (the clause tolerance bound "
                          "beta/(M-1) degenerates at M=1)")
    if delta <= 0:
        raise ConfigError("delta must be positive")
    a = ((1.0 - delta / (1.0 + delta)) ** (-m) - 1.0) * (1.0 + (m - 1) / m)
    b = ((1.0 - 1.0 / (m + 1.0)) ** (-d) - 1.0) * (1.0 + (d - 1) * delta)
    c = 2.0 ** d * (1.0 - (d - 1) * delta / (1.0 + (d - 1) * delta)) ** (-m) - 1.0
    rho = b
    beta = max(a, c)
    if not d * delta < rho:
        raise ConfigError("D*delta=%g >= rho=%g; choose a smaller delta"
                          % (d * delta, rho))
    return rho, beta


def brute_force_decision(instance):
    """Exhaustive decision: compare the best feasible objective against
    the threshold gamma built from schedules using at most D-1 clauses.

    Returns (max_objective, gamma, answer) with
    answer = exists a feasible schedule with objective >= gamma.
    """
    n = instance.num_users
    if n > BRUTE_FORCE_USER_CAP:
        raise SizeCapError("2M+D=%d users exceed the enumeration cap %d"
                           % (n, BRUTE_FORCE_USER_CAP))
    d = instance.formula.num_clauses
    first_clause = instance.num_literal_users
    best_all = -math.inf
    best_capped = -math.inf
    for mask in range(1 << n):
        sched = [i for i in range(n) if mask >> i & 1]
        objective, feasible = evaluate(instance, sched)
        if not feasible:
            continue
        best_all = max(best_all, objective)
        if sum(1 for i in sched if i >= first_clause) <= d - 1:
            best_capped = max(best_capped, objective)
    gamma = best_capped * (1.0 + GAMMA_RELATIVE_BUMP)
    return best_all, gamma, best_all >= gamma


def sat_brute_force(formula):
    """Ground-truth satisfiability over all 2^M assignments."""
    m = formula.num_vars
    for mask in range(1 << m):
        assignment = [(mask >> v) & 1 == 1 for v in range(m)]
        ok = all(any((lit > 0) == assignment[abs(lit) - 1] for lit in clause)
                 for clause in formula.clauses)
        if ok:
            return True
    return False
