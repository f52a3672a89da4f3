import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import random_quiver, random_skew, weighted_pair
from mutopo import (
    EmptySubset,
    FrozenMutation,
    NotSkewSymmetrizable,
    apply_sequence,
    build,
    disjoint_union,
    from_inline,
    from_json_dict,
    from_text,
    is_acyclic,
    is_isomorphic,
    mutate,
    restrict,
    to_json_dict,
    to_text,
)


class TestBuild:
    def test_symmetrizer_rank2(self):
        B = build(2, 0, [[0, 1], [-2, 0]])
        assert B.d == (2, 1)

    def test_skew_symmetric_gets_all_ones(self, a3):
        assert a3.d == (1, 1, 1)

    def test_sign_coherence_rejected(self):
        with pytest.raises(NotSkewSymmetrizable):
            build(2, 0, [[0, 1], [1, 0]])

    def test_half_zero_pair_rejected(self):
        with pytest.raises(NotSkewSymmetrizable):
            build(2, 0, [[0, 1], [0, 0]])

    def test_nonzero_diagonal_rejected(self):
        with pytest.raises(NotSkewSymmetrizable):
            build(2, 0, [[1, 1], [-1, 0]])

    def test_inconsistent_cycle_rejected(self):
        # propagation forces d3 = d1 along 1-2-3 but d3 = d1/2 along 1-3
        rows = [[0, 1, 1], [-1, 0, 1], [-2, -1, 0]]
        with pytest.raises(NotSkewSymmetrizable):
            build(3, 0, rows)

    def test_no_mutable_indices_rejected(self):
        with pytest.raises(ValueError):
            build(0, 1, [[0]])

    def test_bad_shape_rejected(self):
        with pytest.raises(ValueError):
            build(2, 0, [[0, 1, 0], [-1, 0, 0]])

    def test_symmetrizer_normalized_per_component(self):
        # component {1,2} needs d = (2,1); isolated index gets 1
        B = build(3, 0, [[0, 1, 0], [-2, 0, 0], [0, 0, 0]])
        assert B.d == (2, 1, 1)

    def test_frozen_split_recorded(self):
        B = build(1, 1, [[0, 1], [-1, 0]])
        assert (B.n, B.m, B.size) == (1, 1, 2)


class TestMutate:
    def test_rank2_sign_flip(self, a2):
        assert mutate(a2, 1).b == ((0, -1), (1, 0))

    def test_a3_at_middle_gives_oriented_cycle(self, a3):
        assert mutate(a3, 2).b == ((0, -1, 1), (1, 0, -1), (-1, 1, 0))

    def test_markov_mutation_is_isomorphic_swap(self, markov):
        out = mutate(markov, 1)
        assert out.b == ((0, -2, 2), (2, 0, -2), (-2, 2, 0))
        swapped = build(3, 0, [[out.b[p][q] for q in (0, 2, 1)] for p in (0, 2, 1)])
        assert swapped.b == markov.b
        assert is_isomorphic(out, markov)

    def test_frozen_index_rejected(self):
        B = build(1, 1, [[0, 1], [-1, 0]])
        with pytest.raises(FrozenMutation):
            mutate(B, 2)
        assert mutate(B, 1).b == ((0, -1), (1, 0))

    def test_out_of_range_rejected(self, a3):
        with pytest.raises(FrozenMutation):
            mutate(a3, 0)
        with pytest.raises(FrozenMutation):
            mutate(a3, 4)

    def test_matches_graph_rules_on_samples(self):
        rng = random.Random(7)
        for _ in range(200):
            size = rng.randint(2, 5)
            B = random_quiver(rng, size, 3)
            k = rng.randint(1, size)
            expected = oracles.graph_mutate([list(r) for r in B.b], k)
            assert [list(r) for r in mutate(B, k).b] == expected


@st.composite
def skew_matrices(draw):
    n = draw(st.integers(min_value=1, max_value=4))
    m = draw(st.integers(min_value=0, max_value=2))
    seed = draw(st.integers(min_value=0, max_value=2**30))
    return random_skew(random.Random(seed), n, m)


class TestMutationProperties:
    @given(B=skew_matrices(), data=st.data())
    @settings(max_examples=150, deadline=None)
    def test_involution(self, B, data):
        k = data.draw(st.integers(min_value=1, max_value=B.n))
        assert mutate(mutate(B, k), k).b == B.b

    @given(B=skew_matrices(), data=st.data())
    @settings(max_examples=150, deadline=None)
    def test_symmetrizer_still_valid_after_mutation(self, B, data):
        k = data.draw(st.integers(min_value=1, max_value=B.n))
        out = mutate(B, k)
        assert out.d == B.d
        for i in range(out.size):
            for j in range(out.size):
                assert out.d[i] * out.b[i][j] == -out.d[j] * out.b[j][i]

    @given(B=skew_matrices())
    @settings(max_examples=100, deadline=None)
    def test_rebuild_reproduces_symmetrizer(self, B):
        assert build(B.n, B.m, B.b).d == B.d


class TestRestrict:
    def test_a3_outer_pair_is_arrowless(self, a3):
        assert restrict(a3, [1, 3]).b == ((0, 0), (0, 0))

    def test_a3_first_pair_is_a2(self, a3, a2):
        assert restrict(a3, [1, 2]).b == a2.b

    def test_full_subset_is_identity(self, a3):
        assert restrict(a3, [1, 2, 3]) == a3

    def test_empty_rejected(self, a3):
        with pytest.raises(EmptySubset):
            restrict(a3, [])

    def test_all_frozen_rejected(self):
        B = build(1, 2, [[0, 1, 0], [-1, 0, 1], [0, -1, 0]])
        with pytest.raises(EmptySubset):
            restrict(B, [2, 3])

    def test_duplicates_rejected(self, a3):
        with pytest.raises(ValueError):
            restrict(a3, [1, 1])

    def test_statuses_preserved(self):
        B = build(2, 1, [[0, 1, 0], [-1, 0, 1], [0, -1, 0]])
        sub = restrict(B, [2, 3])
        assert (sub.n, sub.m) == (1, 1)

    def test_symmetrizer_renormalizes(self):
        B = build(2, 0, [[0, 1], [-2, 0]])  # d = (2, 1)
        assert restrict(B, [1]).d == (1,)


class TestDisjointUnion:
    def test_pt_pt(self, pt, i2):
        assert disjoint_union(pt, pt).b == i2.b

    def test_a2_pt(self, a2, pt):
        assert disjoint_union(a2, pt).b == ((0, 1, 0), (-1, 0, 0), (0, 0, 0))

    def test_blocks_recover_factors(self, a3, markov):
        R = disjoint_union(a3, markov)
        assert restrict(R, [1, 2, 3]) == a3
        assert restrict(R, [4, 5, 6]) == markov

    def test_frozen_blocks_interleave(self):
        P = build(1, 1, [[0, 1], [-1, 0]])
        Q = build(1, 1, [[0, 2], [-2, 0]])
        R = disjoint_union(P, Q)
        assert (R.n, R.m) == (2, 2)
        assert restrict(R, [1, 3]) == P
        assert restrict(R, [2, 4]) == Q

    def test_commutative_and_associative_up_to_isomorphism(self):
        rng = random.Random(13)
        for _ in range(25):
            P = random_quiver(rng, rng.randint(1, 3), 2)
            Q = random_quiver(rng, rng.randint(1, 3), 2)
            R = random_quiver(rng, rng.randint(1, 2), 2)
            assert is_isomorphic(disjoint_union(P, Q), disjoint_union(Q, P))
            assert is_isomorphic(
                disjoint_union(disjoint_union(P, Q), R),
                disjoint_union(P, disjoint_union(Q, R)),
            )


class TestIsAcyclic:
    def test_path(self, a3):
        assert is_acyclic(a3)

    def test_oriented_cycle(self, a3):
        assert not is_acyclic(mutate(a3, 2))

    def test_arrowless(self, i2):
        assert is_acyclic(i2)

    def test_only_mutable_part_counts(self):
        # mutable pair is acyclic; arrows through the frozen index are ignored
        B = build(2, 1, [[0, 1, -1], [-1, 0, 1], [1, -1, 0]])
        assert is_acyclic(B)


class TestFormats:
    def test_json_round_trip(self, a3):
        assert from_json_dict(to_json_dict(a3)) == a3

    def test_json_keys(self, a3):
        obj = to_json_dict(a3)
        assert set(obj) == {"mutable", "frozen", "b"}
        assert obj["mutable"] == 3 and obj["frozen"] == 0

    def test_text_round_trip(self):
        B = build(1, 1, [[0, 2], [-1, 0]])
        assert from_text(to_text(B)) == B

    def test_text_format_shape(self, a2):
        assert to_text(a2) == "2 0\n0 1\n-1 0"

    def test_inline(self):
        assert from_inline("0 1;-1 0") == weighted_pair(1)
        assert from_inline("0 1;-1 0", frozen=1).m == 1

    def test_sequences(self, a3):
        assert apply_sequence(a3, []) == a3
        assert apply_sequence(a3, [2, 2]) == a3
