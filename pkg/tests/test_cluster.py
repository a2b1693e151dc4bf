"""Agglomeration, Newick export, flat cuts, and the adjusted Rand index."""

from __future__ import annotations

import numpy as np
import pytest
from conftest import make_records
from hypothesis import given, settings
from hypothesis import strategies as st

from versealign.cluster import (
    Dendrogram,
    IdMismatchError,
    KOutOfRangeError,
    Merge,
    Partition,
    adjusted_rand_index,
    agglomerate,
    cut,
    load_partition,
    partition_from_labels,
    save_partition,
    to_newick,
)
from versealign.distance import DistanceMatrix, distance_matrix


def matrix_from_pairs(ids, pairs):
    n = len(ids)
    values = np.zeros((n, n))
    index = {id_: i for i, id_ in enumerate(ids)}
    for (a, b), d in pairs.items():
        values[index[a], index[b]] = d
        values[index[b], index[a]] = d
    return DistanceMatrix(ids=tuple(ids), values=values)


FOUR_POINT = matrix_from_pairs(
    ("a", "b", "c", "d"),
    {
        ("a", "b"): 0.2,
        ("a", "c"): 0.5,
        ("b", "c"): 0.3,
        ("a", "d"): 0.8,
        ("b", "d"): 0.7,
        ("c", "d"): 0.9,
    },
)


def random_matrix(rng: np.random.Generator, n: int) -> DistanceMatrix:
    raw = rng.random((n, n))
    values = (raw + raw.T) / 2.0
    np.fill_diagonal(values, 0.0)
    return DistanceMatrix(
        ids=tuple(f"x{i:02d}" for i in range(n)), values=values
    )


def newick_topology(text: str):
    """Parse a Newick string into nested frozensets of leaf names."""
    pos = 0

    def node():
        nonlocal pos
        if text[pos] == "(":
            pos += 1
            left = node()
            assert text[pos] == ","
            pos += 1
            right = node()
            assert text[pos] == ")"
            pos += 1
            out = frozenset([left, right])
        else:
            start = pos
            while text[pos] not in ":,();":
                pos += 1
            out = text[start:pos]
        if pos < len(text) and text[pos] == ":":
            pos += 1
            while text[pos] not in ",();":
                pos += 1
        return out

    tree = node()
    assert text[pos] == ";"
    return tree


def dendro_topology(dendro: Dendrogram):
    n = len(dendro.ids)
    nodes = {i: dendro.ids[i] for i in range(n)}
    for m in dendro.merges:
        nodes[m.node] = frozenset([nodes[m.left], nodes[m.right]])
    return nodes[dendro.merges[-1].node] if dendro.merges else nodes[0]


class TestAgglomerate:
    def test_average_linkage_hand_example(self):
        dendro = agglomerate(FOUR_POINT, "average")
        heights = [m.height for m in dendro.merges]
        assert heights == pytest.approx([0.2, 0.4, 0.8], abs=1e-12)
        assert (dendro.merges[0].left, dendro.merges[0].right) == (0, 1)
        assert (dendro.merges[1].left, dendro.merges[1].right) == (4, 2)
        assert (dendro.merges[2].left, dendro.merges[2].right) == (5, 3)

    def test_complete_linkage_hand_example(self):
        heights = [m.height for m in agglomerate(FOUR_POINT, "complete").merges]
        assert heights == pytest.approx([0.2, 0.5, 0.9], abs=1e-12)

    def test_single_linkage_hand_example(self):
        heights = [m.height for m in agglomerate(FOUR_POINT, "single").merges]
        assert heights == pytest.approx([0.2, 0.3, 0.7], abs=1e-12)

    def test_identical_pair_merges_first_at_zero(self):
        records = make_records(["wSwS|", "wSwS|", "S.S.S.S|"], ids=["p", "q", "far"])
        dendro = agglomerate(distance_matrix(records))
        first = dendro.merges[0]
        assert first.height == 0.0
        assert {dendro.ids[first.left], dendro.ids[first.right]} == {"p", "q"}

    def test_unknown_linkage_rejected(self):
        with pytest.raises(ValueError, match="linkage"):
            agglomerate(FOUR_POINT, "ward")

    def test_too_small_rejected(self):
        one = DistanceMatrix(ids=("a",), values=np.zeros((1, 1)))
        with pytest.raises(ValueError):
            agglomerate(one)

    def test_permuting_input_order_gives_the_same_tree(self):
        rng = np.random.default_rng(21)
        base = random_matrix(rng, 9)
        perm = rng.permutation(9)
        shuffled = DistanceMatrix(
            ids=tuple(base.ids[i] for i in perm),
            values=base.values[np.ix_(perm, perm)],
        )
        for linkage in ("average", "complete", "single"):
            da = agglomerate(base, linkage)
            db = agglomerate(shuffled, linkage)
            assert [m.height for m in da.merges] == pytest.approx(
                [m.height for m in db.merges], abs=1e-12
            )
            assert dendro_topology(da) == dendro_topology(db)

    def test_heights_are_monotone(self):
        rng = np.random.default_rng(22)
        for _ in range(20):
            m = random_matrix(rng, int(rng.integers(2, 12)))
            for linkage in ("average", "complete", "single"):
                heights = [mg.height for mg in agglomerate(m, linkage).merges]
                assert heights == sorted(heights)

    def test_well_separated_classes_recovered_exactly(self):
        rng = np.random.default_rng(23)
        n = 12
        truth = ["u"] * 6 + ["v"] * 6
        values = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                near = truth[i] == truth[j]
                d = rng.uniform(0.01, 0.1) if near else rng.uniform(0.8, 0.95)
                values[i, j] = values[j, i] = d
        ids = tuple(f"s{i:02d}" for i in range(n))
        matrix = DistanceMatrix(ids=ids, values=values)
        found = cut(agglomerate(matrix), 2)
        assert adjusted_rand_index(found, partition_from_labels(ids, truth)) == 1.0

    def test_matches_external_reference_implementation(self):
        scipy_cluster = pytest.importorskip("scipy.cluster.hierarchy")
        squareform = pytest.importorskip("scipy.spatial.distance").squareform
        rng = np.random.default_rng(24)
        for _ in range(10):
            m = random_matrix(rng, 10)
            cond = squareform(m.values, checks=False)
            for linkage in ("average", "complete", "single"):
                mine = agglomerate(m, linkage)
                z = scipy_cluster.linkage(cond, method=linkage)
                assert [mg.height for mg in mine.merges] == pytest.approx(
                    list(z[:, 2]), abs=1e-12
                )
                for k in (2, 3, 5):
                    ref = scipy_cluster.fcluster(z, t=k, criterion="maxclust")
                    ref_part = partition_from_labels(m.ids, [str(c) for c in ref])
                    assert adjusted_rand_index(cut(mine, k), ref_part) == 1.0


class TestNewick:
    def test_two_leaf_midpoint_convention(self):
        m = matrix_from_pairs(("a", "b"), {("a", "b"): 0.5})
        assert to_newick(agglomerate(m)) == "(a:0.25,b:0.25);"

    def test_three_leaf_caterpillar(self):
        m = matrix_from_pairs(
            ("a", "b", "c"),
            {("a", "b"): 0.2, ("a", "c"): 0.5, ("b", "c"): 0.6},
        )
        assert to_newick(agglomerate(m)) == "((a:0.1,b:0.1):0.175,c:0.275);"

    def test_ids_are_sanitized(self):
        m = matrix_from_pairs(("po em#1", "q"), {("po em#1", "q"): 0.4})
        assert to_newick(agglomerate(m)) == "(po_em_1:0.2,q:0.2);"

    def test_round_trip_topology(self):
        rng = np.random.default_rng(25)
        for _ in range(10):
            dendro = agglomerate(random_matrix(rng, int(rng.integers(2, 10))))
            text = to_newick(dendro)
            assert text.endswith(";")
            assert newick_topology(text) == dendro_topology(dendro)


class TestCut:
    def test_k_one_is_a_single_cluster(self):
        part = cut(agglomerate(FOUR_POINT), 1)
        assert part.n_clusters == 1
        assert set(part.assignments) == {0}

    def test_k_n_is_all_singletons(self):
        part = cut(agglomerate(FOUR_POINT), 4)
        assert part.n_clusters == 4
        assert sorted(part.assignments) == [0, 1, 2, 3]

    def test_k_two_on_hand_example(self):
        part = cut(agglomerate(FOUR_POINT), 2)
        groups = {}
        for id_, c in zip(part.ids, part.assignments):
            groups.setdefault(c, set()).add(id_)
        assert sorted(groups.values(), key=len) == [{"d"}, {"a", "b", "c"}]

    def test_identical_pair_example(self):
        records = make_records(["wSwS|", "wSwS|", "S.S.S.S|"], ids=["p", "q", "far"])
        part = cut(agglomerate(distance_matrix(records)), 2)
        by_id = dict(zip(part.ids, part.assignments))
        assert by_id["p"] == by_id["q"] != by_id["far"]

    def test_cluster_indices_follow_smallest_member_id(self):
        m = matrix_from_pairs(("b", "a"), {("b", "a"): 0.3})
        part = cut(agglomerate(m), 2)
        assert dict(zip(part.ids, part.assignments)) == {"a": 0, "b": 1}

    def test_out_of_range_rejected(self):
        dendro = agglomerate(FOUR_POINT)
        with pytest.raises(KOutOfRangeError):
            cut(dendro, 0)
        with pytest.raises(KOutOfRangeError):
            cut(dendro, 5)


class TestPartition:
    def test_indices_must_be_contiguous_from_zero(self):
        with pytest.raises(ValueError, match="contiguous"):
            Partition(ids=("a", "b"), assignments=(0, 2))

    def test_duplicate_ids_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            Partition(ids=("a", "a"), assignments=(0, 1))

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            Partition(ids=("a", "b"), assignments=(0,))

    def test_from_labels_renumbers_by_smallest_id(self):
        part = partition_from_labels(["z", "a", "m"], ["red", "blue", "red"])
        assert dict(zip(part.ids, part.assignments)) == {"a": 0, "z": 1, "m": 1}

    def test_save_load_round_trip(self, tmp_path):
        part = partition_from_labels(["a", "b", "c"], ["x", "y", "x"])
        path = str(tmp_path / "part.tsv")
        save_partition(part, path)
        assert load_partition(path) == part

    def test_load_renumbers_arbitrary_tokens(self, tmp_path):
        path = str(tmp_path / "part.tsv")
        open(path, "w").write("a\tred\nb\tblue\nc\tred\n")
        part = load_partition(path)
        assert dict(zip(part.ids, part.assignments)) == {"a": 0, "b": 1, "c": 0}

    def test_load_rejects_malformed_rows(self, tmp_path):
        path = str(tmp_path / "part.tsv")
        open(path, "w").write("a\t1\textra\n")
        with pytest.raises(ValueError):
            load_partition(path)

    def test_load_rejects_empty_file(self, tmp_path):
        path = str(tmp_path / "part.tsv")
        open(path, "w").close()
        with pytest.raises(ValueError, match="empty"):
            load_partition(path)


def labels_to_partition(labels, ids=None):
    ids = ids or [f"i{i}" for i in range(len(labels))]
    return partition_from_labels(ids, [str(lab) for lab in labels])


class TestAdjustedRandIndex:
    def test_identical_is_exactly_one(self):
        p = labels_to_partition([0, 0, 1, 1, 2])
        assert adjusted_rand_index(p, p) == 1.0

    def test_renamed_clusters_still_one(self):
        a = labels_to_partition(["x", "x", "y", "y"])
        b = labels_to_partition(["green", "green", "red", "red"])
        assert adjusted_rand_index(a, b) == 1.0

    def test_crossed_pairs_give_minus_half(self):
        a = labels_to_partition([0, 0, 1, 1])
        b = labels_to_partition([0, 1, 0, 1])
        assert adjusted_rand_index(a, b) == pytest.approx(-0.5, abs=1e-12)

    def test_shifted_boundary_gives_one_sixth(self):
        a = labels_to_partition([0, 0, 0, 1, 1])
        b = labels_to_partition([0, 0, 1, 1, 1])
        assert adjusted_rand_index(a, b) == pytest.approx(1 / 6, abs=1e-12)

    def test_split_last_cluster_gives_twelve_seventeenths(self):
        a = labels_to_partition([0, 0, 0, 1, 1, 1])
        b = labels_to_partition([0, 0, 0, 1, 1, 2])
        assert adjusted_rand_index(a, b) == pytest.approx(12 / 17, abs=1e-12)

    def test_singletons_versus_one_cluster_is_zero(self):
        a = labels_to_partition([0, 1, 2])
        b = labels_to_partition([0, 0, 0])
        assert adjusted_rand_index(a, b) == 0.0

    def test_degenerate_identical_cases_are_one(self):
        singles = labels_to_partition([0, 1, 2])
        assert adjusted_rand_index(singles, labels_to_partition([2, 0, 1])) == 1.0
        lump = labels_to_partition([0, 0, 0])
        assert adjusted_rand_index(lump, lump) == 1.0

    def test_id_order_does_not_matter(self):
        a = partition_from_labels(["p", "q", "r"], ["x", "x", "y"])
        b = partition_from_labels(["r", "p", "q"], ["c2", "c1", "c1"])
        assert adjusted_rand_index(a, b) == 1.0

    def test_mismatched_ids_rejected(self):
        a = partition_from_labels(["p", "q"], ["x", "x"])
        b = partition_from_labels(["p", "z"], ["x", "x"])
        with pytest.raises(IdMismatchError):
            adjusted_rand_index(a, b)

    @given(
        st.lists(st.integers(0, 3), min_size=2, max_size=12),
        st.data(),
    )
    @settings(max_examples=100)
    def test_symmetric_and_relabel_invariant(self, labels_a, data):
        n = len(labels_a)
        labels_b = data.draw(
            st.lists(st.integers(0, 3), min_size=n, max_size=n)
        )
        a, b = labels_to_partition(labels_a), labels_to_partition(labels_b)
        ab = adjusted_rand_index(a, b)
        assert ab == adjusted_rand_index(b, a)
        assert ab <= 1.0
        relabeled = labels_to_partition([(x + 2) % 4 for x in labels_a])
        assert adjusted_rand_index(relabeled, b) == pytest.approx(ab, abs=1e-12)
        assert adjusted_rand_index(a, a) == 1.0

    def test_matches_external_reference_implementation(self):
        sk = pytest.importorskip("sklearn.metrics")
        rng = np.random.default_rng(26)
        for _ in range(50):
            n = int(rng.integers(2, 30))
            la = rng.integers(0, 5, n)
            lb = rng.integers(0, 5, n)
            mine = adjusted_rand_index(labels_to_partition(la), labels_to_partition(lb))
            ref = sk.adjusted_rand_score(la, lb)
            assert mine == pytest.approx(ref, abs=1e-12)
