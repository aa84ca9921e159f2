# Copyright 2017--2022 Amazon.com, Inc. or its affiliates. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License"). You may not
# use this file except in compliance with the License. A copy of the License
# is located at
#
#     http://aws.amazon.com/apache2.0/
#
# or in the "license" file accompanying this file. This file is distributed on
# an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""
Compiles the factorization of an odd semiprime N = x * y into a problem Hamiltonian.

The binary multiplication table of x and y (known widths, leading and trailing bits 1) yields one
equation per column over the unknown multiplier bits and carry variables z_ij (carry from column i
into column j, weight 2^(j-i)). The equations are simplified with binary-logic rules and every
remaining equation contributes (LHS - RHS)^2 to a diagonal penalty operator, bit b -> (I - sigma_z)/2.
"""
import itertools
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
import sympy

from . import constants as C
from . import qcore
from .utils import AqfactorError

logger = logging.getLogger(__name__)


class InvalidWidths(AqfactorError):
    pass


class Infeasible(AqfactorError):
    pass


class TooManyQubits(AqfactorError):
    pass


class TooLarge(AqfactorError):
    pass


@dataclass(frozen=True)
class BitVariable:
    name: str
    kind: str

    @property
    def symbol(self) -> sympy.Symbol:
        return sympy.Symbol(self.name)

    def __str__(self) -> str:
        return self.name


Bit = Union[int, BitVariable]


def _bit_expr(bit: Bit) -> sympy.Expr:
    return sympy.Integer(bit) if isinstance(bit, int) else bit.symbol


@dataclass
class Column:
    index: int
    target: int
    products: List[Tuple[int, int]]
    carries_in: List[BitVariable] = field(default_factory=list)
    carries_out: List[BitVariable] = field(default_factory=list)

    @property
    def num_terms(self) -> int:
        return len(self.products) + len(self.carries_in)


@dataclass
class MultiplicationTable:
    """
    Long multiplication of x (width_x bits) and y (width_y bits) with target N.
    Bit lists are least significant first; fixed bits are the integer 1.
    """
    n: int
    width_x: int
    width_y: int
    x_bits: List[Bit]
    y_bits: List[Bit]
    columns: List[Column]

    @property
    def unknowns(self) -> List[BitVariable]:
        return [b for b in self.x_bits + self.y_bits if isinstance(b, BitVariable)]

    @property
    def carries(self) -> List[BitVariable]:
        return [z for column in self.columns for z in column.carries_out]

    @property
    def variables(self) -> List[BitVariable]:
        return self.unknowns + self.carries

    def product_expr(self, i: int, j: int) -> sympy.Expr:
        return _bit_expr(self.x_bits[i]) * _bit_expr(self.y_bits[j])

    def factor_value(self, bits: List[Bit], assignment: Dict[str, int]) -> int:
        return sum((b if isinstance(b, int) else assignment[b.name]) << i for i, b in enumerate(bits))

    def pattern(self, bits: List[Bit]) -> str:
        """
        Most significant bit first, e.g. '1p1'.
        """
        return "".join(str(b) for b in reversed(bits))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "width_x": self.width_x,
            "width_y": self.width_y,
            "x_pattern": [str(b) for b in reversed(self.x_bits)],
            "y_pattern": [str(b) for b in reversed(self.y_bits)],
            "unknowns": [v.name for v in self.unknowns],
            "carries": [z.name for z in self.carries],
            "columns": [{"column": c.index,
                         "target": c.target,
                         "products": [str(self.product_expr(i, j)) for i, j in c.products],
                         "carries_in": [z.name for z in c.carries_in],
                         "carries_out": [z.name for z in c.carries_out]} for c in self.columns],
        }


def width_bounds(width_x: int, width_y: int) -> Tuple[int, int]:
    """
    Smallest and largest products of odd numbers with the given widths and leading bit 1.
    """
    return ((2 ** (width_x - 1) + 1) * (2 ** (width_y - 1) + 1),
            (2 ** width_x - 1) * (2 ** width_y - 1))


def candidate_widths(n: int) -> List[Tuple[int, int]]:
    """
    Widths (wx <= wy) whose products can reach n, most balanced first and shorter totals first among equally
    balanced pairs. Products of a wx-bit and a wy-bit number have wx + wy - 1 or wx + wy bits, so only those two
    totals are candidates.
    """
    bit_length = n.bit_length()
    candidates = []  # type: List[Tuple[int, int]]
    for total in (bit_length, bit_length + 1):
        for width_x in range(2, total // 2 + 1):
            lower, upper = width_bounds(width_x, total - width_x)
            if lower <= n <= upper:
                candidates.append((width_x, total - width_x))
    return sorted(candidates, key=lambda w: (w[1] - w[0], w[0] + w[1]))


def choose_widths(n: int) -> Tuple[int, int]:
    """
    Most balanced widths whose products can reach n.
    """
    candidates = candidate_widths(n)
    if not candidates:
        raise InvalidWidths("No factor widths can produce %d" % n)
    return candidates[0]


def _multiplier_bits(width: int, prefix: str) -> List[Bit]:
    interior = width - 2
    bits = [1]  # type: List[Bit]
    for i in range(1, width - 1):
        name = prefix if interior == 1 else "%s%d" % (prefix, i)
        bits.append(BitVariable(name, C.VAR_KIND_MULTIPLIER))
    bits.append(1)
    return bits


def _carry_name(source: int, dest: int) -> str:
    if source < 10 and dest < 10:
        return "%s%d%d" % (C.CARRY_PREFIX, source, dest)
    return "%s%d_%d" % (C.CARRY_PREFIX, source, dest)


def build_table(n: int, width_x: int, width_y: int) -> MultiplicationTable:
    """
    Builds the multiplication table for n = x * y.

    A column with k terms (partial products plus incoming carries) emits ceil(log2 k) carries into the
    following columns; carries that would land beyond the most significant bit of n are dropped, which is
    the same as requiring them to be zero.

    :param n: Odd target number, at least 9.
    :param width_x: Bit width of x.
    :param width_y: Bit width of y.
    :return: Multiplication table.
    :raises InvalidWidths: If n is not a product of numbers with these widths.
    """
    if n % 2 == 0 or n < C.MIN_SEMIPRIME:
        raise InvalidWidths("N must be odd and at least %d, got %d" % (C.MIN_SEMIPRIME, n))
    if width_x < 2 or width_y < 2:
        raise InvalidWidths("Widths must be at least 2, got %d and %d" % (width_x, width_y))
    lower, upper = width_bounds(width_x, width_y)
    if not lower <= n <= upper:
        raise InvalidWidths("%d does not fit widths %dx%d (products range over [%d, %d])"
                            % (n, width_x, width_y, lower, upper))

    x_bits = _multiplier_bits(width_x, C.X_BIT_PREFIX)
    y_bits = _multiplier_bits(width_y, C.Y_BIT_PREFIX)
    top = n.bit_length() - 1
    columns = [Column(index=k, target=(n >> k) & 1,
                      products=[(i, k - i) for i in range(width_x) if 0 <= k - i < width_y])
               for k in range(top + 1)]
    for column in columns:
        num_carries = (column.num_terms - 1).bit_length() if column.num_terms > 1 else 0
        for ahead in range(1, num_carries + 1):
            dest = column.index + ahead
            if dest > top:
                break
            carry = BitVariable(_carry_name(column.index, dest), C.VAR_KIND_CARRY)
            column.carries_out.append(carry)
            columns[dest].carries_in.append(carry)
    table = MultiplicationTable(n=n, width_x=width_x, width_y=width_y, x_bits=x_bits, y_bits=y_bits, columns=columns)
    logger.info("Multiplication table for %d: x=%s y=%s, %d unknowns, %d carries",
                n, table.pattern(x_bits), table.pattern(y_bits), len(table.unknowns), len(table.carries))
    return table


@dataclass
class Equation:
    lhs: sympy.Expr
    rhs: sympy.Expr
    column: Optional[int] = None

    @property
    def residual(self) -> sympy.Expr:
        return sympy.expand(self.lhs - self.rhs)

    @property
    def symbols(self) -> List[sympy.Symbol]:
        return sorted(self.residual.free_symbols, key=lambda s: s.name)

    @staticmethod
    def from_residual(residual: sympy.Expr, column: Optional[int] = None) -> 'Equation':
        """
        Canonical form: positive terms on the left, negated negative terms and constant on the right.
        """
        lhs, rhs = sympy.Integer(0), sympy.Integer(0)
        for monomial, coeff in sympy.expand(residual).as_coefficients_dict().items():
            term = coeff * monomial
            if monomial != 1 and coeff > 0:
                lhs += term
            else:
                rhs -= term
        return Equation(lhs, rhs, column)

    def __str__(self) -> str:
        return "%s = %s" % (self.lhs, self.rhs)


@dataclass
class ConstraintSystem:
    """
    Binary polynomial equations plus the registry of their variables. `fixed` holds variables whose values
    were determined during simplification (they no longer appear in the equations or the registry).
    """
    equations: List[Equation]
    variables: List[BitVariable]
    fixed: Dict[str, int] = field(default_factory=dict)

    @property
    def variable_names(self) -> List[str]:
        return [v.name for v in self.variables]

    @property
    def symbols(self) -> List[sympy.Symbol]:
        return [v.symbol for v in self.variables]

    def to_dict(self) -> Dict[str, Any]:
        return {"equations": [str(eq) for eq in self.equations],
                "variables": self.variable_names,
                "fixed": dict(sorted(self.fixed.items()))}


def column_equations(table: MultiplicationTable) -> ConstraintSystem:
    """
    One equation per column: partial products + incoming carries = target bit + sum_k 2^k * (carry k columns
    ahead). Trivially satisfied columns are dropped.
    """
    equations = []
    for column in table.columns:
        lhs = sympy.Add(*[table.product_expr(i, j) for i, j in column.products],
                        *[z.symbol for z in column.carries_in])
        rhs = sympy.Add(sympy.Integer(column.target),
                        *[2 ** (k + 1) * z.symbol for k, z in enumerate(column.carries_out)])
        equation = Equation(lhs, rhs, column.index)
        if equation.residual == 0:
            logger.debug("Column %d is trivially satisfied: %s", column.index, equation)
            continue
        equations.append(equation)
    return ConstraintSystem(equations=equations, variables=table.variables)


def _assignment_grid(num_vars: int) -> np.ndarray:
    """
    All binary assignments in lexicographic order, first variable most significant. Shape (2^n, n).
    """
    rows = np.arange(2 ** num_vars, dtype=np.int64)[:, None]
    return (rows >> np.arange(num_vars - 1, -1, -1, dtype=np.int64)) & 1


def _evaluate(expr: sympy.Expr, symbols: Sequence[sympy.Symbol], grid: np.ndarray) -> np.ndarray:
    func = sympy.lambdify(list(symbols), expr, modules="numpy")
    values = func(*[grid[:, i] for i in range(grid.shape[1])])
    return np.broadcast_to(np.asarray(values, dtype=np.int64), (grid.shape[0],))


def brute_force_solutions(system: ConstraintSystem) -> List[Dict[str, int]]:
    """
    All binary assignments of the registry variables that satisfy every equation, in lexicographic order.

    :raises TooLarge: Beyond C.BRUTE_FORCE_MAX_VARS variables.
    """
    names = system.variable_names
    if len(names) > C.BRUTE_FORCE_MAX_VARS:
        raise TooLarge("Brute force over %d variables exceeds the limit of %d" % (len(names), C.BRUTE_FORCE_MAX_VARS))
    grid = _assignment_grid(len(names))
    satisfied = np.ones(grid.shape[0], dtype=bool)
    for equation in system.equations:
        satisfied &= _evaluate(equation.residual, system.symbols, grid) == 0
    return [dict(zip(names, (int(v) for v in row))) for row in grid[satisfied]]


def project_solutions(system: ConstraintSystem, names: Sequence[str]) -> Set[Tuple[int, ...]]:
    """
    Solutions of the system (fixed values included) restricted to the given variable names.
    """
    return {tuple({**system.fixed, **solution}[name] for name in names)
            for solution in brute_force_solutions(system)}


@dataclass
class RuleApplication:
    rule: str
    equation: str
    detail: str = ""

    def to_dict(self) -> Dict[str, str]:
        return {"rule": self.rule, "equation": self.equation, "detail": self.detail}


@dataclass
class SimplificationLedger:
    entries: List[RuleApplication] = field(default_factory=list)

    def add(self, rule: str, equation: Union[Equation, str], detail: str = ""):
        self.entries.append(RuleApplication(rule, str(equation), detail))
        logger.debug("%s: %s %s", rule, equation, detail)

    @property
    def stats(self) -> Dict[str, int]:
        counts = Counter(entry.rule for entry in self.entries)
        return {rule: counts.get(rule, 0) for rule in C.RULES}

    def __len__(self) -> int:
        return len(self.entries)


def reduce_binary(expr: sympy.Expr) -> sympy.Expr:
    """
    Expands and applies idempotence b^k = b to every binary variable.
    """
    expr = sympy.expand(expr)
    if expr.is_Number:
        return expr
    gens = sorted(expr.free_symbols, key=lambda s: s.name)
    terms = defaultdict(lambda: sympy.Integer(0))  # type: Dict[Tuple[int, ...], sympy.Expr]
    for monom, coeff in sympy.Poly(expr, *gens).terms():
        terms[tuple(min(e, 1) for e in monom)] += coeff
    return sympy.Add(*[coeff * sympy.Mul(*[g for g, e in zip(gens, key) if e]) for key, coeff in terms.items()])


def _monomials(residual: sympy.Expr) -> Tuple[int, List[Tuple[int, Tuple[sympy.Symbol, ...]]]]:
    constant = 0
    monomials = []
    for monomial, coeff in residual.as_coefficients_dict().items():
        if monomial == 1:
            constant += int(coeff)
        else:
            monomials.append((int(coeff), tuple(sorted(monomial.free_symbols, key=lambda s: s.name))))
    return constant, sorted(monomials, key=lambda m: [s.name for s in m[1]])


def propagate_bounds(residual: sympy.Expr) -> Dict[sympy.Symbol, int]:
    """
    Treats each monomial of `residual = 0` as an independent 0/1 quantity and fixes every monomial whose
    other value would put 0 outside the range of the remaining terms. A monomial forced to 1 fixes all of its
    variables to 1; a single-variable monomial forced to 0 fixes that variable to 0.

    :raises Infeasible: If 0 is outside the range of the residual or the forced values conflict.
    """
    constant, monomials = _monomials(residual)
    lower = constant + sum(min(c, 0) for c, _ in monomials)
    upper = constant + sum(max(c, 0) for c, _ in monomials)
    if lower > 0 or upper < 0:
        raise Infeasible("%s = 0 has range [%d, %d]" % (residual, lower, upper))
    fixes = {}  # type: Dict[sympy.Symbol, int]

    def fix(symbol: sympy.Symbol, value: int):
        if fixes.get(symbol, value) != value:
            raise Infeasible("%s = 0 forces %s to both 0 and 1" % (residual, symbol))
        fixes[symbol] = value

    for coeff, symbols in monomials:
        rest_lower = lower - min(coeff, 0)
        rest_upper = upper - max(coeff, 0)
        zero_possible = rest_lower <= 0 <= rest_upper
        one_possible = rest_lower + coeff <= 0 <= rest_upper + coeff
        if not zero_possible and not one_possible:
            raise Infeasible("%s = 0 has no value for %s" % (residual, sympy.Mul(*symbols)))
        if not zero_possible:
            for symbol in symbols:
                fix(symbol, 1)
        elif not one_possible and len(symbols) == 1:
            fix(symbols[0], 0)
    return fixes


def _implies(premise: Equation, conclusion: Equation) -> bool:
    """
    True if every assignment of the premise's variables satisfying it also satisfies the conclusion.
    Only called when the conclusion's variables are a subset of the premise's.
    """
    symbols = premise.symbols
    grid = _assignment_grid(len(symbols))
    satisfied = _evaluate(premise.residual, symbols, grid) == 0
    return bool(np.all(_evaluate(conclusion.residual, symbols, grid[satisfied]) == 0))


def _same_equation(a: sympy.Expr, b: sympy.Expr) -> bool:
    return sympy.expand(a - b) == 0 or sympy.expand(a + b) == 0


def simplify(system: ConstraintSystem,
             max_subsumption_vars: int = 12) -> Tuple[ConstraintSystem, SimplificationLedger]:
    """
    Fixed-point iteration of idempotence, bound propagation, substitution of fixed variables (which also
    linearizes products with fixed partners) and removal of satisfied, duplicate and subsumed equations.
    The binary solution set projected onto the multiplier bits is unchanged; for systems of at most
    C.SIMPLIFY_VERIFY_MAX_VARS variables this is verified by brute force.

    :param system: Constraint system.
    :param max_subsumption_vars: Largest variable count for which implication between equations is enumerated.
    :return: Simplified system and the ledger of rule applications.
    :raises Infeasible: If an equation is proven unsatisfiable.
    """
    ledger = SimplificationLedger()
    residuals = []  # type: List[Tuple[sympy.Expr, Optional[int]]]
    for equation in system.equations:
        reduced = reduce_binary(equation.residual)
        if reduced != equation.residual:
            ledger.add(C.RULE_EXPAND, equation, "-> %s" % Equation.from_residual(reduced))
        residuals.append((reduced, equation.column))
    fixed = dict(system.fixed)

    changed = True
    while changed:
        changed = False
        # bound propagation
        fixes = {}  # type: Dict[sympy.Symbol, int]
        for residual, _ in residuals:
            for symbol, value in propagate_bounds(residual).items():
                if fixes.get(symbol, value) != value:
                    raise Infeasible("Conflicting values derived for %s" % symbol)
                if symbol not in fixes:
                    ledger.add(C.RULE_BOUNDS, Equation.from_residual(residual), "%s=%d" % (symbol, value))
                fixes[symbol] = value
        # substitution
        if fixes:
            changed = True
            fixed.update({symbol.name: value for symbol, value in fixes.items()})
            substituted = []
            for residual, column in residuals:
                new_residual = reduce_binary(residual.subs(fixes))
                if new_residual != residual:
                    ledger.add(C.RULE_SUBSTITUTE, Equation.from_residual(residual),
                               "-> %s" % Equation.from_residual(new_residual))
                substituted.append((new_residual, column))
            residuals = substituted
        # satisfied and contradictory equations
        remaining = []
        for residual, column in residuals:
            if residual.is_Number:
                if residual != 0:
                    raise Infeasible("Equation reduced to the contradiction %s" % Equation.from_residual(residual))
                ledger.add(C.RULE_SATISFIED, "column %s" % column)
                changed = True
                continue
            remaining.append((residual, column))
        residuals = remaining
        # duplicates
        unique = []  # type: List[Tuple[sympy.Expr, Optional[int]]]
        for residual, column in residuals:
            if any(_same_equation(residual, other) for other, _ in unique):
                ledger.add(C.RULE_DUPLICATE, Equation.from_residual(residual, column))
                changed = True
                continue
            unique.append((residual, column))
        residuals = unique
        # subsumption
        kept = list(residuals)
        for candidate in residuals:
            conclusion = Equation.from_residual(*candidate)
            conclusion_symbols = set(conclusion.symbols)
            for other in kept:
                if other is candidate:
                    continue
                premise = Equation.from_residual(*other)
                premise_symbols = set(premise.symbols)
                if conclusion_symbols <= premise_symbols and len(premise_symbols) <= max_subsumption_vars \
                        and _implies(premise, conclusion):
                    ledger.add(C.RULE_SUBSUMED, conclusion, "implied by %s" % premise)
                    kept.remove(candidate)
                    changed = True
                    break
        residuals = kept

    equations = [Equation.from_residual(residual, column) for residual, column in residuals]
    used = set(symbol.name for equation in equations for symbol in equation.symbols)
    variables = [v for v in system.variables
                 if v.name not in fixed and (v.kind == C.VAR_KIND_MULTIPLIER or v.name in used)]
    simplified = ConstraintSystem(equations=equations, variables=variables, fixed=fixed)
    logger.info("Simplified %d equations over %d variables to %d equations over %d variables (%d rule applications)",
                len(system.equations), len(system.variables), len(equations), len(variables), len(ledger))

    if len(system.variables) <= C.SIMPLIFY_VERIFY_MAX_VARS:
        multipliers = [v.name for v in system.variables if v.kind == C.VAR_KIND_MULTIPLIER]
        if project_solutions(system, multipliers) != project_solutions(simplified, multipliers):
            raise AqfactorError("Simplification changed the solution set; this is a bug in the rule set")
    return simplified, ledger


@dataclass
class ProblemHamiltonianSpec:
    """
    Diagonal problem Hamiltonian of a constraint system. `penalty` is the unscaled sum of squared residuals per
    computational basis state; `operator` is g1 * (penalty - offset/g1) with the identity component removed and
    `offset` holds that identity component (scaled), so operator + offset * I = g1 * diag(penalty).
    """
    qubit_assignment: Dict[str, int]
    operator: qcore.ComplexMatrix
    offset: float
    g1: float
    penalty: np.ndarray
    ising_terms: Dict[Tuple[int, ...], float]
    fixed_values: Dict[str, int] = field(default_factory=dict)

    @property
    def n_qubits(self) -> int:
        return len(self.qubit_assignment)

    @property
    def penalty_operator(self) -> qcore.ComplexMatrix:
        return self.operator + self.offset * qcore.identity(self.operator.shape[0])

    @property
    def ground_indices(self) -> List[int]:
        return [int(i) for i in np.flatnonzero(self.penalty == self.penalty.min())]

    @property
    def is_feasible(self) -> bool:
        return bool(self.penalty.min() == 0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "qubits": dict(self.qubit_assignment),
            "g1": self.g1,
            "offset": self.offset,
            "penalty": [int(v) for v in self.penalty],
            "diagonal": [float(v) for v in np.real(np.diag(self.operator))],
            "operator_real": np.real(self.operator).tolist(),
            "operator_imag": np.imag(self.operator).tolist(),
            "ising_terms": {" ".join("Z%d" % q for q in key) or "I": value
                            for key, value in sorted(self.ising_terms.items())},
        }


def ising_coefficients(penalty: np.ndarray, n_qubits: int, tol: float = 1e-12) -> Dict[Tuple[int, ...], float]:
    """
    Expansion of a diagonal into products of sigma_z (sigma_z = +1 on |0>), keyed by qubit tuples.
    """
    signs = 1 - 2 * _assignment_grid(n_qubits)
    coefficients = {}
    for size in range(n_qubits + 1):
        for subset in itertools.combinations(range(n_qubits), size):
            parity = np.prod(signs[:, list(subset)], axis=1) if subset else np.ones(len(penalty))
            value = float(np.mean(penalty * parity))
            if abs(value) > tol:
                coefficients[subset] = value
    return coefficients


def to_hamiltonian(system: ConstraintSystem, g1: float = C.DEFAULT_G1,
                   qubit_budget: int = C.DEFAULT_QUBIT_BUDGET) -> ProblemHamiltonianSpec:
    """
    Emits sum over equations of (LHS - RHS)^2 with b -> (I - sigma_z)/2, identity dropped and scaled by g1.
    Qubits follow the registry order, first variable on the leftmost qubit.

    :param system: Constraint system.
    :param g1: Energy scale.
    :param qubit_budget: Maximum number of qubits for which a matrix is emitted.
    :return: Problem Hamiltonian.
    :raises TooManyQubits: If the system has more variables than the budget.
    """
    names = system.variable_names
    if len(names) > qubit_budget:
        raise TooManyQubits("%d variables remain, the qubit budget is %d" % (len(names), qubit_budget))
    grid = _assignment_grid(len(names))
    penalty = np.zeros(grid.shape[0], dtype=np.int64)
    for equation in system.equations:
        penalty += _evaluate(equation.residual, system.symbols, grid) ** 2
    mean = float(np.mean(penalty))
    operator = np.diag(g1 * (penalty - mean)).astype(complex)
    return ProblemHamiltonianSpec(qubit_assignment={name: i for i, name in enumerate(names)},
                                  operator=operator,
                                  offset=g1 * mean,
                                  g1=g1,
                                  penalty=penalty,
                                  ising_terms=ising_coefficients(penalty, len(names)),
                                  fixed_values=dict(system.fixed))


@dataclass
class DecodedSolution:
    basis_index: int
    x: int
    y: int
    assignment: Dict[str, int]
    is_ground_state: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"basis_index": self.basis_index, "x": self.x, "y": self.y,
                "is_ground_state": self.is_ground_state}


def decode_solution(basis_index: int, spec: ProblemHamiltonianSpec, table: MultiplicationTable) -> DecodedSolution:
    """
    Reconstructs x and y from a computational basis state by inserting its qubit values (and the values fixed
    during simplification) into the bit patterns of the table. States that are not ground states of the penalty,
    or whose factors do not multiply to N, are flagged.
    """
    dim = 2 ** spec.n_qubits
    if not 0 <= basis_index < dim:
        raise qcore.DimensionMismatch("basis index %d out of range for %d qubits" % (basis_index, spec.n_qubits))
    assignment = dict(spec.fixed_values)
    for name, qubit in spec.qubit_assignment.items():
        assignment[name] = (basis_index >> (spec.n_qubits - 1 - qubit)) & 1
    x = table.factor_value(table.x_bits, assignment)
    y = table.factor_value(table.y_bits, assignment)
    flag = x * y != table.n or bool(spec.penalty[basis_index] != 0)
    if flag:
        logger.warning("Basis state %d decodes to %d x %d = %d, not a ground state for N=%d",
                       basis_index, x, y, x * y, table.n)
    return DecodedSolution(basis_index=basis_index, x=x, y=y, assignment=assignment, is_ground_state=not flag)


@dataclass
class CompilationResult:
    table: MultiplicationTable
    system: ConstraintSystem
    reduced: ConstraintSystem
    ledger: SimplificationLedger
    hamiltonian: Optional[ProblemHamiltonianSpec]
    solutions: List[DecodedSolution]

    @property
    def factors(self) -> List[Tuple[int, int]]:
        return sorted({(s.x, s.y) for s in self.solutions})

    @property
    def qubits_needed(self) -> int:
        return len(self.reduced.variables)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "table": self.table.to_dict(),
            "equations": [str(eq) for eq in self.system.equations],
            "reduced": self.reduced.to_dict(),
            "ledger": [entry.to_dict() for entry in self.ledger.entries],
            "rule_counts": self.ledger.stats,
            "qubits_needed": self.qubits_needed,
            "hamiltonian": self.hamiltonian.to_dict() if self.hamiltonian is not None else None,
            "solutions": [s.to_dict() for s in self.solutions],
            "factors": [list(f) for f in self.factors],
        }


def compile_factoring(n: int,
                      width_x: Optional[int] = None,
                      width_y: Optional[int] = None,
                      simplify_system: bool = True,
                      g1: float = C.DEFAULT_G1,
                      qubit_budget: int = C.DEFAULT_QUBIT_BUDGET) -> CompilationResult:
    """
    Full compiler stage: table, column equations, simplification, Hamiltonian emission and decoding of its
    ground states. Beyond the qubit budget the result carries no Hamiltonian and solutions come from brute force,
    which is skipped (no solutions) beyond C.BRUTE_FORCE_MAX_VARS variables.
    Without explicit widths the candidates of `candidate_widths` are tried in order until one is feasible.

    :raises InvalidWidths: If no widths can produce n.
    :raises Infeasible: If the system has no solution for any of the tried widths.
    """
    if width_x is not None and width_y is not None:
        return _compile_with_widths(n, width_x, width_y, simplify_system, g1, qubit_budget)
    candidates = candidate_widths(n)
    if not candidates:
        raise InvalidWidths("No factor widths can produce %d" % n)
    error = None  # type: Optional[Infeasible]
    for width_x, width_y in candidates:
        logger.info("Using factor widths %dx%d for N=%d", width_x, width_y, n)
        try:
            return _compile_with_widths(n, width_x, width_y, simplify_system, g1, qubit_budget)
        except Infeasible as e:
            logger.info("Widths %dx%d: %s", width_x, width_y, e)
            error = e
    raise Infeasible("No assignment satisfies the constraints for N=%d with widths %s (last: %s)"
                     % (n, ", ".join("%dx%d" % w for w in candidates), error))


def _compile_with_widths(n: int, width_x: int, width_y: int, simplify_system: bool, g1: float,
                         qubit_budget: int) -> CompilationResult:
    table = build_table(n, width_x, width_y)
    system = column_equations(table)
    if simplify_system:
        reduced, ledger = simplify(system)
    else:
        reduced, ledger = system, SimplificationLedger()

    try:
        hamiltonian = to_hamiltonian(reduced, g1=g1, qubit_budget=qubit_budget)  # type: Optional[ProblemHamiltonianSpec]
    except TooManyQubits as e:
        logger.warning("%s; emitting the system without a matrix", e)
        hamiltonian = None

    if hamiltonian is not None:
        if not hamiltonian.is_feasible:
            raise Infeasible("No assignment satisfies the constraints for N=%d with widths %dx%d"
                             % (n, width_x, width_y))
        solutions = [decode_solution(i, hamiltonian, table) for i in hamiltonian.ground_indices]
    elif len(reduced.variables) > C.BRUTE_FORCE_MAX_VARS:
        logger.warning("%d variables exceed the brute force limit of %d; solutions are not decoded",
                       len(reduced.variables), C.BRUTE_FORCE_MAX_VARS)
        solutions = []
    else:
        assignments = brute_force_solutions(reduced)
        if not assignments:
            raise Infeasible("No assignment satisfies the constraints for N=%d with widths %dx%d"
                             % (n, width_x, width_y))
        solutions = []
        for assignment in assignments:
            full = {**reduced.fixed, **assignment}
            x, y = table.factor_value(table.x_bits, full), table.factor_value(table.y_bits, full)
            solutions.append(DecodedSolution(basis_index=-1, x=x, y=y, assignment=full,
                                             is_ground_state=x * y == n))
    logger.info("N=%d: %d qubits, factor pairs %s", n, len(reduced.variables), sorted({(s.x, s.y) for s in solutions}))
    return CompilationResult(table=table, system=system, reduced=reduced, ledger=ledger,
                             hamiltonian=hamiltonian, solutions=solutions)
