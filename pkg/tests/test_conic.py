#!/usr/bin/env python

#  WPCN-Alloc
#   Copyright (C) 2023 The WPCN-Alloc authors
#
#   This program is free software; you can redistribute it and/or modify
#   it under the terms of the GNU General Public License as published by
#   the Free Software Foundation; either version 2 of the License, or
#   (at your option) any later version.
#
#   This program is distributed in the hope that it will be useful,
#   but WITHOUT ANY WARRANTY; without even the implied warranty of
#   MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#   GNU General Public License for more details.
#
#   You should have received a copy of the GNU General Public License along
#   with this program; if not, write to the Free Software Foundation, Inc.,
#   51 Franklin Street, Fifth Floor, Boston, MA 02110-1301 USA.

"""The conic subproblem solver"""

import numpy as np
import pytest

from wpcn.core import conic
from wpcn.core.conic import AffineRow, SdpSubproblem, Sense, SolveStatus
from wpcn.core.exceptions import DomainError


def _random_vector(rng, size):
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def _harvest_problem(users, scale=1.0):
    """minimize Tr(V) subject to h_k^H V h_k >= 1 for every user"""
    rows = [
        AffineRow({0: np.outer(h, h.conj())}, {}, Sense.GE, 1.0, label=f"user{k}")
        for k, h in enumerate(users)
    ]
    return SdpSubproblem(
        psd_block_dims=[users[0].size],
        n_scalars=0,
        block_objective=[1.0],
        scalar_objective=np.zeros(0),
        constraints=rows,
        block_scales=[scale],
    )


def test_real_embedding():
    """Eigenvalues double up and the map inverts"""
    rng = np.random.default_rng(1)
    root = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    hermitian = root @ root.conj().T
    embedded = conic.hermitian_to_real_embedding(hermitian)
    assert embedded.shape == (6, 6)
    assert np.allclose(embedded, embedded.T)
    doubled = np.sort(np.repeat(np.linalg.eigvalsh(hermitian), 2))
    assert np.linalg.eigvalsh(embedded) == pytest.approx(doubled, rel=1e-10)
    assert np.allclose(conic.real_to_hermitian(embedded), hermitian, atol=1e-12)
    with pytest.raises(DomainError):
        conic.hermitian_to_real_embedding(root)


def test_scalar_block():
    """A 1x1 block is a non-negative scalar"""
    sp = SdpSubproblem(
        psd_block_dims=[1],
        n_scalars=0,
        block_objective=[1.0],
        scalar_objective=np.zeros(0),
        constraints=[AffineRow({0: np.eye(1)}, {}, Sense.GE, 2.0)],
    )
    sol = conic.solve(sp)
    assert sol.status is SolveStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(2.0, rel=1e-7)
    assert sol.v_blocks[0][0, 0].real == pytest.approx(2.0, rel=1e-7)


def test_single_user_is_rank_one():
    """The optimum is h h^H / ||h||^4 with value 1/||h||^2"""
    rng = np.random.default_rng(2)
    h = _random_vector(rng, 4)
    gain = float(np.vdot(h, h).real)
    sol = conic.solve(_harvest_problem([h], scale=1.0 / gain))
    assert sol.status is SolveStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(1.0 / gain, rel=1e-7)
    expected = np.outer(h, h.conj()) / gain**2
    assert np.linalg.norm(sol.v_blocks[0] - expected) <= 1e-6 * np.linalg.norm(expected)


@pytest.mark.parametrize("magnitude", [1.0, 1.0e-6, 1.0e3])
def test_kkt_certificate(magnitude):
    """Two users, with the data at very different scales"""
    rng = np.random.default_rng(3)
    users = [magnitude * _random_vector(rng, 3) for _ in range(2)]
    sol = conic.solve(_harvest_problem(users, scale=1.0 / magnitude**2))
    assert sol.status is SolveStatus.OPTIMAL
    report = conic.verify_kkt(_harvest_problem(users), sol)
    assert report.worst() <= 1e-6
    assert report.gap <= 1e-6
    # >= rows carry non-negative multipliers
    assert np.all(sol.row_duals >= -1e-9 * np.max(np.abs(sol.row_duals)))
    for h in users:
        assert float(np.real(h.conj() @ sol.v_blocks[0] @ h)) >= 1.0 - 1e-7


def test_scalars_and_equality():
    """minimize s0 + 2 s1 subject to s0 + s1 = 1 and s1 >= 0.25"""
    sp = SdpSubproblem(
        psd_block_dims=[2],
        n_scalars=2,
        block_objective=[1.0],
        scalar_objective=np.array([1.0, 2.0]),
        constraints=[
            AffineRow({}, {0: 1.0, 1: 1.0}, Sense.EQ, 1.0, label="sum"),
            AffineRow({}, {1: 1.0}, Sense.GE, 0.25, label="floor"),
        ],
    )
    sol = conic.solve(sp)
    assert sol.status is SolveStatus.OPTIMAL
    assert sol.scalars == pytest.approx(np.array([0.75, 0.25]), abs=1e-7)
    assert sol.objective_value == pytest.approx(1.25, rel=1e-7)
    assert np.abs(np.trace(sol.v_blocks[0])) <= 1e-7
    assert conic.verify_kkt(sp, sol).worst() <= 1e-6


def test_presolve_infeasible():
    """Tr(V) <= -1 has no PSD solution"""
    sp = SdpSubproblem(
        psd_block_dims=[2],
        n_scalars=0,
        block_objective=[1.0],
        scalar_objective=np.zeros(0),
        constraints=[AffineRow({0: np.eye(2)}, {}, Sense.LE, -1.0, label="negative")],
    )
    sol = conic.solve(sp)
    assert sol.status is SolveStatus.INFEASIBLE
    assert sol.iterations == 0


def test_infeasible_rows():
    """h^H V h >= 1 cannot hold with Tr(V) <= 1/(2 ||h||^2)"""
    rng = np.random.default_rng(4)
    h = _random_vector(rng, 3)
    gain = float(np.vdot(h, h).real)
    sp = _harvest_problem([h])
    sp.constraints.append(AffineRow({0: np.eye(3)}, {}, Sense.LE, 0.5 / gain, label="budget"))
    assert conic.solve(sp).status is not SolveStatus.OPTIMAL


def test_no_constraints():
    """Only the cones: zero is optimal"""
    sp = SdpSubproblem(
        psd_block_dims=[2, 3],
        n_scalars=1,
        block_objective=[1.0, 2.0],
        scalar_objective=np.array([0.5]),
        constraints=[],
    )
    sol = conic.solve(sp)
    assert sol.status is SolveStatus.OPTIMAL
    assert sol.objective_value == 0.0
    assert all(not np.any(v) for v in sol.v_blocks)
    assert conic.verify_kkt(sp, sol).worst() == 0.0


def test_subproblem_validation():
    """Shapes and Hermitian symmetry are checked up front"""
    with pytest.raises(DomainError):
        SdpSubproblem([2], 0, [1.0, 1.0], np.zeros(0), [])
    with pytest.raises(DomainError):
        SdpSubproblem([2], 0, [1.0], np.zeros(0), [AffineRow({0: np.eye(3)}, {}, Sense.GE, 1.0)])
    skew = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(DomainError):
        SdpSubproblem([2], 0, [1.0], np.zeros(0), [AffineRow({0: skew}, {}, Sense.GE, 1.0)])
    with pytest.raises(DomainError):
        SdpSubproblem([2], 1, [1.0], np.zeros(1), [AffineRow({}, {3: 1.0}, Sense.GE, 1.0)])
    with pytest.raises(DomainError):
        conic.solve(_harvest_problem([np.ones(2, dtype=complex)]), backend="nope")


def test_dump_subproblem(tmp_path):
    """One row/end section per constraint"""
    rng = np.random.default_rng(5)
    sp = _harvest_problem([_random_vector(rng, 3) for _ in range(2)])
    path = tmp_path / "subproblem.txt"
    conic.dump_subproblem(sp, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "blocks 3"
    assert lines[1] == "scalars 0"
    assert lines[2].startswith("objective 1.0 |")
    assert sum(1 for line in lines if line.startswith("row ")) == 2
    assert sum(1 for line in lines if line == "end") == 2
    assert "row user1 >= 1.0" in lines


def test_cvxpy_backend_agrees():
    """The optional cvxpy backend finds the same optimum"""
    pytest.importorskip("cvxpy")
    rng = np.random.default_rng(6)
    sp = _harvest_problem([_random_vector(rng, 3) for _ in range(2)])
    reference = conic.solve(sp)
    other = conic.solve(sp, backend="cvxpy")
    assert other.status is SolveStatus.OPTIMAL
    assert other.objective_value == pytest.approx(reference.objective_value, rel=1e-3)
    assert np.all(other.row_duals >= -1e-6 * np.max(np.abs(other.row_duals)))
