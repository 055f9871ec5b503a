import io
import random

import pytest

from oracles import brute_relative_homology, random_complex, roi_of
from sheafnet.activation import region_of_influence
from sheafnet.complex import BinaryMatrix, Complex, build_closure, rank
from sheafnet.errors import InputFormatError, NotClosedError
from sheafnet.geometry import link_complex, random_network
from sheafnet.homology import (
    cohomology_report,
    lh_averages,
    lh_field,
    local_homology,
    rank_rational,
    read_lh_csv,
    relative_chain_complex,
    sheaf_cohomology_dims,
    vector_sheaf_cochain,
    write_lh_csv,
)


def test_relative_chain_examples(path):
    mid = relative_chain_complex(path, region_of_influence(path, [(1,)]))
    assert mid.bases[0] == ((1,),) and mid.bases[1] == ((0, 1), (1, 2))
    assert mid.boundary(1).to_dense() == [[1, 1]] and rank(mid.boundary(1)) == 1
    end = relative_chain_complex(path, region_of_influence(path, [(0,)]))
    assert end.boundary(1).to_dense() == [[1]]
    single = build_closure([[0]])
    assert relative_chain_complex(single, set(single)).homology_dims(0) == {0: 1}


def test_relative_chain_rejects_open_complement(path):
    with pytest.raises(NotClosedError):
        relative_chain_complex(path, {(0,)})


def test_local_homology_examples(path):
    assert local_homology(path, (1,)).lh == {0: 0, 1: 1, 2: 0}
    assert local_homology(path, (0,)).lh == {0: 0, 1: 0, 2: 0}
    assert local_homology(path, (0, 1)).lh == {0: 0, 1: 0, 2: 0}
    assert local_homology(path, (1, 2)).lh == {0: 0, 1: 0, 2: 0}


def test_lh_field_triangle(triangle):
    scores = {s.cell: s.lh for s in lh_field(triangle)}
    # only the 2-cell's region of influence is the whole triangle
    assert scores[(0, 1, 2)] == {0: 1, 1: 0, 2: 0}
    for c, lh in scores.items():
        assert lh[1] == 0
        if len(c) < 3:
            assert lh == {0: 0, 1: 0, 2: 0}


def test_lh_field_order_and_single_vertex(path):
    scores = lh_field(path)
    assert len(scores) == 5
    assert [s.cell for s in scores] == list(path.cells())
    assert lh_field(build_closure([[0]]), max_k=0)[0].lh == {0: 1}


def test_lh_beyond_dimension_is_zero(path):
    assert local_homology(path, (1,), max_k=5).lh[5] == 0


@pytest.mark.parametrize("seed", range(3))
def test_local_homology_matches_brute_force(seed):
    rng = random.Random(seed)
    for _ in range(30):
        cells = random_complex(rng)
        X = Complex(cells)
        for c in X:
            lh = local_homology(X, c).lh
            roi = roi_of(cells, c)
            for k in range(3):
                assert lh[k] == brute_relative_homology(cells, roi, k), (sorted(cells), c, k)


def test_lh_invariant_under_relabelling():
    X = link_complex(random_network(12, 100, 35, seed=21))
    perm = list(range(12))
    random.Random(3).shuffle(perm)
    Y = X.relabel(dict(enumerate(perm)))
    for c in X:
        image = tuple(sorted(perm[v] for v in c))
        assert local_homology(X, c).lh == local_homology(Y, image).lh


def test_lh_is_local():
    X = build_closure([(0, 1), (1, 2), (1, 3), (5, 6, 7)])
    Y = build_closure([(0, 1), (1, 2), (1, 3)])
    for c in Y:
        assert local_homology(X, c).lh == local_homology(Y, c).lh


def test_lh_averages(path):
    avg = lh_averages(lh_field(path), 1)
    assert avg["nodes"] == pytest.approx(1 / 3)
    assert avg["cells"] == pytest.approx(1 / 5)


def test_lh_csv_round_trip(path):
    scores = lh_field(path)
    buf = io.StringIO()
    write_lh_csv(scores, buf, 2)
    text = buf.getvalue()
    assert text.splitlines()[0] == "cell,dim,lh0,lh1,lh2"
    assert '"1",0,0,1,0' in text.splitlines()
    assert '"0,1",1,0,0,0' in text.splitlines()
    assert read_lh_csv(io.StringIO(text)) == scores


def test_lh_csv_errors():
    with pytest.raises(InputFormatError):
        read_lh_csv(io.StringIO("cell,lh0\n"))
    with pytest.raises(InputFormatError) as err:
        read_lh_csv(io.StringIO('cell,dim,lh0\n"0",0,1\n"0,1",0,1\n'))
    assert err.value.line == 3


def test_vector_sheaf_examples(path):
    cc = vector_sheaf_cochain(path)
    assert cc.stalk_dims() == {(0,): 2, (1,): 3, (2,): 2, (0, 1): 2, (1, 2): 2}
    assert cc.coboundary(0).shape == (4, 7)
    assert rank(cc.coboundary(0)) == 4
    assert sheaf_cohomology_dims(cc) == {0: 3, 1: 0}
    assert sheaf_cohomology_dims(vector_sheaf_cochain(build_closure([[0]]))) == {0: 1}
    assert sheaf_cohomology_dims(vector_sheaf_cochain(build_closure([[0], [1]]))) == {0: 2}


@pytest.mark.parametrize("seed", range(5))
def test_coboundary_squares_to_zero(seed):
    X = link_complex(random_network(10, 60, 30, seed=seed))
    cc = vector_sheaf_cochain(X)
    for k in range(X.dim - 1):
        assert (cc.coboundary(k + 1) @ cc.coboundary(k)).is_zero()


@pytest.mark.parametrize("seed", range(5))
def test_theorem_over_both_fields(seed):
    X = link_complex(random_network(9, 60, 30, seed=100 + seed))
    assert cohomology_report(X)["theorem_holds"]
    assert cohomology_report(X, field="rational")["theorem_holds"]


def test_rational_rank_needs_signs():
    # [[1,1],[1,-1]] has rank 2 over Q but the same pattern has rank 1 over GF(2)
    entries = {(0, 0): 1, (0, 1): 1, (1, 0): 1, (1, 1): -1}
    assert rank_rational(entries, 2, 2) == 2
    assert rank(BinaryMatrix.from_dense([[1, 1], [1, 1]])) == 1


def test_cohomology_report_shape(path):
    assert cohomology_report(path) == {"h": {"0": 3, "1": 0}, "node_count": 3, "theorem_holds": True}
