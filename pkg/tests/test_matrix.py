import numpy as np
import pytest

from hafnium.errors import (
    AsymmetricInput,
    DimensionMismatch,
    NonSquare,
    OddDimension,
    ParseError,
)
from hafnium.matrix import (
    ComplexSymmetricMatrix,
    PairSubset,
    pair_submatrix,
    pair_swap,
    pair_swap_matrix,
    read_array,
    read_matrix,
    split_diag_offdiag,
    validate_or_symmetrize,
    write_matrix,
)

from conftest import random_symmetric


class TestValidateOrSymmetrize:
    def test_strict_accepts_symmetric_unchanged(self):
        M = validate_or_symmetrize([[0, 1], [1, 0]], mode="strict")
        assert np.array_equal(M.entries, np.array([[0, 1], [1, 0]], dtype=complex))

    def test_auto_averages_with_transpose(self):
        M = validate_or_symmetrize([[0, 1], [0, 0]], mode="auto")
        assert np.array_equal(M.entries, np.array([[0, 0.5], [0.5, 0]], dtype=complex))

    def test_strict_rejects_asymmetric(self):
        with pytest.raises(AsymmetricInput):
            validate_or_symmetrize([[0, 1], [0.9, 0]], mode="strict")

    def test_strict_tolerance_scales_with_magnitude(self):
        big = 1e6
        a = np.array([[0, big], [big * (1 + 1e-14), 0]])
        M = validate_or_symmetrize(a, mode="strict")
        assert M.entries[0, 1] == M.entries[1, 0]

    def test_non_square(self):
        with pytest.raises(NonSquare):
            validate_or_symmetrize(np.zeros((2, 3)))

    def test_lower_triangle_mirrored_exactly(self):
        a = random_symmetric(6, 0)
        a[3, 1] += 1e-14  # below tolerance
        M = validate_or_symmetrize(a, mode="strict")
        assert np.array_equal(M.entries, M.entries.T)

    def test_empty_matrix_allowed(self):
        M = validate_or_symmetrize(np.zeros((0, 0)))
        assert M.n == 0

    def test_entries_frozen(self):
        M = validate_or_symmetrize([[0, 1], [1, 0]])
        with pytest.raises(ValueError):
            M.entries[0, 0] = 5.0


class TestPairOps:
    def test_pair_swap_2x2(self):
        a, b, c = 1.7, 2.3 + 1j, -0.4
        out = pair_swap(np.array([[a, b], [b, c]]))
        assert np.array_equal(out, np.array([[b, c], [a, b]]))

    def test_pair_swap_4x4_permutes_rows(self):
        a = np.ones((4, 4), dtype=complex) - np.eye(4)
        out = pair_swap(a)
        perm = [1, 0, 3, 2]
        assert np.array_equal(out, a[perm])

    def test_pair_swap_matches_explicit_matrix_product(self):
        a = random_symmetric(6, 7)
        x = pair_swap_matrix(6)
        assert np.allclose(pair_swap(a), x @ a, rtol=0, atol=0)

    def test_pair_swap_odd_dimension(self):
        with pytest.raises(OddDimension):
            pair_swap(np.zeros((3, 3)))

    def test_pair_swap_involution(self):
        a = random_symmetric(8, 3)
        assert np.array_equal(pair_swap(pair_swap(a)), a)

    def test_pair_submatrix_full_and_empty(self):
        a = random_symmetric(6, 1)
        assert np.array_equal(pair_submatrix(a, PairSubset.full(3)), a)
        empty = pair_submatrix(a, PairSubset(0, 3))
        assert empty.shape == (0, 0)

    def test_pair_submatrix_explicit_indices(self):
        a = random_symmetric(6, 2)
        z = PairSubset(0b101, 3)  # pairs {0, 2} -> rows/cols {0, 1, 4, 5}
        idx = [0, 1, 4, 5]
        expected = np.array([[a[i, j] for j in idx] for i in idx])
        assert np.array_equal(pair_submatrix(a, z), expected)

    def test_pair_submatrix_out_of_range(self):
        with pytest.raises(DimensionMismatch):
            pair_submatrix(np.zeros((2, 2)), PairSubset(0b10, 2))

    @pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
    def test_submatrix_commutes_with_pair_swap(self, n):
        a = random_symmetric(n, n)
        swapped = pair_swap(a)
        for mask in range(1, 1 << (n // 2)):
            z = PairSubset(mask, n // 2)
            left = pair_submatrix(swapped, z)
            right = pair_swap(pair_submatrix(a, z))
            assert np.array_equal(left, right)

    def test_subset_cardinality_and_indices(self):
        z = PairSubset(0b1011, 4)
        assert z.cardinality == 3
        assert z.pair_indices() == [0, 1, 3]
        assert list(z.vertex_indices()) == [0, 1, 2, 3, 6, 7]

    def test_subset_mask_width_check(self):
        with pytest.raises(ValueError):
            PairSubset(0b100, 2)


class TestSplit:
    def test_diagonal_matrix(self):
        v, off = split_diag_offdiag(np.diag([1.0, 2.0]))
        assert np.array_equal(v, np.array([1, 2], dtype=complex))
        assert np.array_equal(off, np.zeros((2, 2)))

    def test_zero_diagonal_passthrough(self):
        a = np.array([[0, 5], [5, 0]], dtype=complex)
        v, off = split_diag_offdiag(a)
        assert np.array_equal(v, np.zeros(2))
        assert np.array_equal(off, a)

    def test_definition(self):
        v, off = split_diag_offdiag(np.array([[1, 5], [5, 3]], dtype=complex))
        assert np.array_equal(v, np.array([1, 3], dtype=complex))
        assert np.array_equal(off, np.array([[0, 5], [5, 0]], dtype=complex))

    def test_parts_sum_exactly(self):
        a = random_symmetric(8, 9)
        v, off = split_diag_offdiag(a)
        assert np.array_equal(np.diag(v) + off, a)


class TestIO:
    def test_text_format_definition(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("2\n0 0 1 0\n1 0 0 0\n")
        M = read_matrix(p)
        assert np.array_equal(M.entries, np.array([[0, 1], [1, 0]], dtype=complex))

    def test_text_comments_and_blank_lines(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("# a comment\n2\n\n0 0 1 2  # trailing\n1 2 0 0\n")
        M = read_matrix(p)
        assert M.entries[0, 1] == 1 + 2j

    def test_binary_roundtrip_bit_exact(self, tmp_path):
        a = random_symmetric(8, 5)
        p = tmp_path / "m.bin"
        write_matrix(a, p, format="binary")
        back = read_matrix(p, format="binary")
        assert np.array_equal(back.entries, validate_or_symmetrize(a).entries)

    def test_text_roundtrip_exact(self, tmp_path):
        a = random_symmetric(6, 11)
        p = tmp_path / "m.txt"
        write_matrix(a, p, format="text")
        assert np.array_equal(read_matrix(p).entries, validate_or_symmetrize(a).entries)

    def test_json_roundtrip(self, tmp_path):
        a = random_symmetric(4, 13)
        p = tmp_path / "m.json"
        write_matrix(a, p, format="json")
        assert np.array_equal(read_matrix(p).entries, validate_or_symmetrize(a).entries)

    def test_row_count_mismatch(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("2\n0 0 1 0\n1 0 0 0\n0 0 0 0\n")
        with pytest.raises(ParseError):
            read_matrix(p)

    def test_declared_rows_missing(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("3\n0 0 1 0 0 0\n1 0 0 0 0 0\n")
        with pytest.raises(DimensionMismatch):
            read_matrix(p)

    def test_bad_float_reports_line(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("2\n0 0 1 0\n1 zap 0 0\n")
        with pytest.raises(ParseError) as exc:
            read_matrix(p)
        assert exc.value.line == 3

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "m.bin"
        p.write_bytes(b"NOPE!" + b"\x00" * 16)
        with pytest.raises(ParseError):
            read_matrix(p, format="binary")

    def test_rectangular_text_roundtrip(self, tmp_path):
        rng = np.random.default_rng(17)
        g = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
        p = tmp_path / "g.txt"
        write_matrix(g, p, format="text")
        assert np.array_equal(read_array(p), g)

    def test_rectangular_binary_roundtrip(self, tmp_path):
        rng = np.random.default_rng(19)
        g = rng.normal(size=(6, 3)) + 1j * rng.normal(size=(6, 3))
        p = tmp_path / "g.bin"
        write_matrix(g, p, format="binary")
        assert np.array_equal(read_array(p, format="binary"), g)

    def test_format_guess_by_extension(self, tmp_path):
        a = random_symmetric(4, 23)
        for name in ("m.txt", "m.bin", "m.json"):
            p = tmp_path / name
            write_matrix(a, p)
            assert np.array_equal(read_matrix(p).entries, validate_or_symmetrize(a).entries)
