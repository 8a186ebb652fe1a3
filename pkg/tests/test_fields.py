import numpy as np
import pytest

from adiwave.errors import ShapeMismatch, TooSmallGrid
from adiwave.fields import (
    GridSpec,
    MaterialField,
    Scheme,
    WaveState,
    allocate_state,
    interior_view,
    read_snapshot,
    reduced_cols,
    reduced_rows,
    write_snapshot,
)
from adiwave.linalg import frobenius_norm


def test_scheme_parse():
    assert Scheme.parse("cfd") is Scheme.NODAL
    assert Scheme.parse("MFD") is Scheme.STAGGERED
    assert Scheme.parse("staggered") is Scheme.STAGGERED
    assert Scheme.NODAL.label == "cfd" and Scheme.STAGGERED.label == "mfd"
    with pytest.raises(ValueError):
        Scheme.parse("spectral")


def test_grid_coordinates():
    g = GridSpec(8)
    assert g.h == 0.125
    assert g.nodes.size == 9
    cb = g.centers_and_edges
    assert cb.size == 10 and cb[0] == 0 and cb[-1] == 1 and cb[1] == 1 / 16


def test_grid_too_small():
    with pytest.raises(TooSmallGrid):
        GridSpec(6)


def test_interior_view_aliases():
    m = np.arange(9.0).reshape(3, 3)
    v = interior_view(m)
    assert v.shape == (1, 1) and v[0, 0] == 4
    v[0, 0] = -1
    assert m[1, 1] == -1
    assert interior_view(np.zeros((17, 17))).shape == (15, 15)


def test_reduced_views():
    N = 16
    assert reduced_rows(np.zeros((N + 2, N + 1))).shape == (N, N + 1)
    assert reduced_cols(np.zeros((N + 1, N + 2))).shape == (N + 1, N)
    assert reduced_rows(np.zeros((3, 5))).shape == (1, 5)
    with pytest.raises(TooSmallGrid):
        reduced_rows(np.zeros((2, 5)))


def test_allocate_shapes():
    s = allocate_state("cfd", 16)
    assert s.U.shape == s.V.shape == s.W.shape == (17, 17)
    s = allocate_state("mfd", 16)
    assert (s.U.shape, s.V.shape, s.W.shape) == ((18, 18), (18, 17), (17, 18))
    assert all(frobenius_norm(a) == 0 for a in (s.U, s.V, s.W))
    assert s.N == 16


def test_validate_rejects_bad_shape():
    s = allocate_state("mfd", 8)
    bad = WaveState(s.scheme, s.U, s.V.T.copy(), s.W)
    with pytest.raises(ShapeMismatch):
        bad.validate()


def test_material_sampling():
    g = GridSpec(8)
    m = MaterialField.sample(g, "mfd", kappa=4.0, rho=2.0)
    assert m.K.shape == (8, 8) and m.RV.shape == (8, 9) and m.RW.shape == (9, 8)
    assert np.all(m.RV == 0.5)
    assert m.c_max == pytest.approx(np.sqrt(2.0))
    var = MaterialField.sample(g, "cfd", kappa=lambda x, y: 1 + x, rho=1.0)
    assert var.c_max == pytest.approx(np.sqrt(var.K.max()))
    with pytest.raises(ValueError):
        MaterialField.sample(g, "cfd", kappa=-1.0)


@pytest.mark.parametrize("suffix", [".csv", ".bin"])
def test_snapshot_roundtrip(tmp_path, suffix):
    s = allocate_state("mfd", 8)
    s.U[:] = np.random.default_rng(0).normal(size=s.U.shape)
    s.time = 0.1234567
    path = write_snapshot(s, tmp_path / f"snap{suffix}")
    scheme, N, t, U = read_snapshot(path)
    assert scheme is Scheme.STAGGERED and N == 8 and t == s.time
    assert np.array_equal(U, s.U)
