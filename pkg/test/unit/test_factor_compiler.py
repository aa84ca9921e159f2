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

import numpy as np
import pytest
import sympy

import aqfactor.constants as C
from aqfactor import factor_compiler as fc
from aqfactor import qcore
from aqfactor.adiabatic_engine import default_problem_hamiltonian

p, q, z = sympy.symbols("p q z")


@pytest.mark.parametrize("n, expected", [(35, (3, 3)), (15, (2, 3)), (21, (2, 3)), (9, (2, 2)), (143, (4, 4))])
def test_choose_widths(n, expected):
    assert fc.choose_widths(n) == expected


def test_choose_widths_fails():
    with pytest.raises(fc.InvalidWidths):
        fc.choose_widths(7)


@pytest.mark.parametrize("n, wx, wy", [(35, 2, 2), (34, 3, 3), (5, 2, 2), (35, 1, 5)])
def test_build_table_invalid(n, wx, wy):
    with pytest.raises(fc.InvalidWidths):
        fc.build_table(n, wx, wy)


def test_table_35():
    table = fc.build_table(35, 3, 3)
    assert table.pattern(table.x_bits) == "1p1"
    assert table.pattern(table.y_bits) == "1q1"
    assert [v.name for v in table.unknowns] == ["p", "q"]
    assert [z.name for z in table.carries] == ["z12", "z23", "z24", "z34", "z35", "z45"]
    assert [c.target for c in table.columns] == [1, 1, 0, 0, 0, 1]


def test_column_equations_35():
    system = fc.column_equations(fc.build_table(35, 3, 3))
    # column 0 (1 = 1) is dropped
    assert [eq.column for eq in system.equations] == [1, 2, 3, 4, 5]
    assert str(system.equations[0]) == "p + q = 2*z12 + 1"
    assert len(system.variables) == 8


def test_brute_force_35():
    system = fc.column_equations(fc.build_table(35, 3, 3))
    assert fc.project_solutions(system, ["p", "q"]) == {(0, 1), (1, 0)}


def test_reduce_binary():
    reduced = fc.reduce_binary(p ** 2 + 2 * p * q ** 3)
    assert sympy.expand(reduced - (p + 2 * p * q)) == 0
    assert fc.reduce_binary(sympy.Integer(3)) == 3


def test_equation_canonical_form():
    eq = fc.Equation.from_residual(p + q - 1)
    assert str(eq) == "p + q = 1"
    assert sympy.expand(eq.residual - (p + q - 1)) == 0


@pytest.mark.parametrize("residual, expected", [(p + q - 2, {p: 1, q: 1}),
                                                (p + 2 * z - 1, {z: 0}),
                                                (p + q - 1, {}),
                                                (p * q - 1, {p: 1, q: 1})])
def test_propagate_bounds(residual, expected):
    assert fc.propagate_bounds(residual) == expected


@pytest.mark.parametrize("residual", [p + q + 1, p + q - 3])
def test_propagate_bounds_infeasible(residual):
    with pytest.raises(fc.Infeasible):
        fc.propagate_bounds(residual)


def test_simplify_35():
    system = fc.column_equations(fc.build_table(35, 3, 3))
    reduced, ledger = fc.simplify(system)
    assert reduced.variable_names == ["p", "q"]
    assert len(reduced.equations) == 1
    assert sympy.expand(reduced.equations[0].residual ** 2 - (p + q - 1) ** 2) == 0
    assert len(ledger) > 0
    assert set(ledger.stats) == set(C.RULES)
    assert fc.project_solutions(reduced, ["p", "q"]) == {(0, 1), (1, 0)}
    assert fc.brute_force_solutions(reduced) == [{"p": 0, "q": 1}, {"p": 1, "q": 0}]


def test_simplify_infeasible():
    system = fc.ConstraintSystem(equations=[fc.Equation(p + q, sympy.Integer(3))],
                                 variables=[fc.BitVariable("p", C.VAR_KIND_MULTIPLIER),
                                            fc.BitVariable("q", C.VAR_KIND_MULTIPLIER)])
    with pytest.raises(fc.Infeasible):
        fc.simplify(system)


def test_hamiltonian_35():
    result = fc.compile_factoring(35, g1=2.)
    h = result.hamiltonian
    assert h.n_qubits == 2
    assert h.qubit_assignment == {"p": 0, "q": 1}
    assert list(h.penalty) == [1, 0, 0, 1]
    assert np.allclose(h.operator, default_problem_hamiltonian(2.))
    assert np.isclose(h.offset, 1.)
    assert np.allclose(h.penalty_operator, 2. * np.diag(h.penalty))
    assert h.ground_indices == [1, 2]
    assert h.ising_terms == {(): 0.5, (0, 1): 0.5}
    assert result.factors == [(5, 7), (7, 5)]


def test_decode_non_solution():
    result = fc.compile_factoring(35)
    decoded = fc.decode_solution(0, result.hamiltonian, result.table)
    assert (decoded.x, decoded.y) == (5, 5)
    assert not decoded.is_ground_state
    assert fc.decode_solution(1, result.hamiltonian, result.table).is_ground_state
    with pytest.raises(qcore.DimensionMismatch):
        fc.decode_solution(4, result.hamiltonian, result.table)


def test_compile_fully_determined():
    result = fc.compile_factoring(15)
    assert result.hamiltonian.n_qubits == 0
    assert result.hamiltonian.operator.shape == (1, 1)
    assert result.factors == [(3, 5)]


def test_compile_without_simplification():
    result = fc.compile_factoring(35, simplify_system=False, qubit_budget=8)
    assert result.hamiltonian.n_qubits == 8
    assert {(s.x, s.y) for s in result.solutions} == {(5, 7), (7, 5)}
    assert len(result.ledger) == 0


def test_compile_beyond_budget():
    result = fc.compile_factoring(35, qubit_budget=1)
    assert result.hamiltonian is None
    assert result.qubits_needed == 2
    assert result.factors == [(5, 7), (7, 5)]
    assert result.to_dict()["hamiltonian"] is None


def test_to_hamiltonian_budget():
    system = fc.column_equations(fc.build_table(35, 3, 3))
    with pytest.raises(fc.TooManyQubits):
        fc.to_hamiltonian(system, qubit_budget=3)


def test_compile_143():
    result = fc.compile_factoring(143)
    assert set(result.factors) == {(11, 13), (13, 11)}
    assert all(s.is_ground_state for s in result.solutions)


def test_compile_prime():
    # 17 lies in the 2 x 3 product range but 3 x 5 = 15 and 3 x 7 = 21
    with pytest.raises(fc.Infeasible):
        fc.compile_factoring(17)


def test_candidate_widths_most_balanced_first():
    assert fc.candidate_widths(323) == [(5, 5), (4, 5)]
    assert fc.candidate_widths(7) == []


def test_compile_323():
    # 17 x 19: both factors have five bits
    result = fc.compile_factoring(323)
    assert result.hamiltonian is None
    assert (result.table.width_x, result.table.width_y) == (5, 5)
    assert result.factors == [(17, 19), (19, 17)]
    assert all(s.is_ground_state for s in result.solutions)


def test_compile_falls_through_infeasible_widths():
    # 33 = 3 x 11 fits the 3 x 3 product range but only factors with widths 2 x 4
    assert fc.candidate_widths(33) == [(3, 3), (2, 4)]
    result = fc.compile_factoring(33)
    assert (result.table.width_x, result.table.width_y) == (2, 4)
    assert result.factors == [(3, 11)]
    with pytest.raises(fc.Infeasible):
        fc.compile_factoring(33, 3, 3)


def test_compile_beyond_brute_force_limit(monkeypatch):
    monkeypatch.setattr(C, "BRUTE_FORCE_MAX_VARS", 1)
    result = fc.compile_factoring(35, qubit_budget=1)
    assert result.hamiltonian is None
    assert result.qubits_needed == 2
    assert result.solutions == []
    assert result.to_dict()["factors"] == []
