"""Strict Matrix Market reader/writer round trips and error reporting."""

import math

import numpy as np
import pytest

from expmrt import MatrixMarketError
from expmrt.mmio import read_matrix, read_vector, write_matrix, write_vector


def _file(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="ascii")
    return str(p)


def _line_of(excinfo):
    return excinfo.value.line


# ------------------------------------------------------------------ matrices


def test_read_identity(tmp_path):
    path = _file(
        tmp_path,
        "id.mtx",
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 2 1.0\n",
    )
    A = read_matrix(path)
    np.testing.assert_array_equal(A.toarray(), np.eye(2))


def test_read_skips_comments_and_blanks(tmp_path):
    path = _file(
        tmp_path,
        "c.mtx",
        "%%MatrixMarket matrix coordinate real general\n"
        "% a comment\n"
        "\n"
        "2 2 1\n"
        "% another\n"
        "2 1 -3.5\n"
        "\n",
    )
    A = read_matrix(path)
    assert A[1, 0] == -3.5
    assert A.nnz == 1


def test_symmetric_lower_triangle_is_expanded(tmp_path):
    path = _file(
        tmp_path,
        "s.mtx",
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "3 3 4\n"
        "1 1 2.0\n"
        "2 1 -1.0\n"
        "3 2 4.0\n"
        "3 3 5.0\n",
    )
    A = read_matrix(path).toarray()
    want = np.array([[2.0, -1.0, 0.0], [-1.0, 0.0, 4.0], [0.0, 4.0, 5.0]])
    np.testing.assert_array_equal(A, want)


def test_duplicate_entries_are_summed(tmp_path):
    path = _file(
        tmp_path,
        "d.mtx",
        "%%MatrixMarket matrix coordinate real general\n"
        "2 2 3\n"
        "1 2 1.25\n"
        "1 2 2.0\n"
        "2 2 1.0\n",
    )
    A = read_matrix(path)
    assert A[0, 1] == 3.25


def test_integer_field(tmp_path):
    path = _file(
        tmp_path,
        "i.mtx",
        "%%MatrixMarket matrix coordinate integer general\n2 2 2\n1 1 3\n2 1 -7\n",
    )
    A = read_matrix(path).toarray()
    np.testing.assert_array_equal(A, [[3.0, 0.0], [-7.0, 0.0]])
    assert A.dtype == np.float64


def test_integer_field_rejects_fraction(tmp_path):
    path = _file(
        tmp_path,
        "ibad.mtx",
        "%%MatrixMarket matrix coordinate integer general\n2 2 1\n1 1 3.5\n",
    )
    with pytest.raises(MatrixMarketError) as exc:
        read_matrix(path)
    assert _line_of(exc) == 3


def test_empty_matrix_allowed(tmp_path):
    path = _file(
        tmp_path, "z.mtx", "%%MatrixMarket matrix coordinate real general\n3 3 0\n"
    )
    assert read_matrix(path).nnz == 0


@pytest.mark.parametrize(
    "header",
    [
        "",
        "%%MatrixMarket matrix coordinate\n1 1 1\n1 1 1.0\n",
        "MatrixMarket matrix coordinate real general\n1 1 1\n1 1 1.0\n",
        "%%MatrixMarket tensor coordinate real general\n1 1 1\n1 1 1.0\n",
        "%%MatrixMarket matrix array real general\n1 1 1\n1 1 1.0\n",
        "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1.0\n",
        "%%MatrixMarket matrix coordinate real hermitian\n1 1 1\n1 1 1.0\n",
    ],
)
def test_header_errors_are_line_one(tmp_path, header):
    path = _file(tmp_path, "h.mtx", header)
    with pytest.raises(MatrixMarketError) as exc:
        read_matrix(path)
    assert _line_of(exc) == 1


def test_missing_size_line(tmp_path):
    path = _file(
        tmp_path,
        "m.mtx",
        "%%MatrixMarket matrix coordinate real general\n% only comments\n",
    )
    with pytest.raises(MatrixMarketError) as exc:
        read_matrix(path)
    assert _line_of(exc) == 3


@pytest.mark.parametrize(
    "size_line", ["2 2", "2 2 x", "0 2 1", "2 2 -1"]
)
def test_bad_size_line_reports_its_line(tmp_path, size_line):
    path = _file(
        tmp_path,
        "b.mtx",
        f"%%MatrixMarket matrix coordinate real general\n{size_line}\n",
    )
    with pytest.raises(MatrixMarketError) as exc:
        read_matrix(path)
    assert _line_of(exc) == 2


def test_symmetric_must_be_square(tmp_path):
    path = _file(
        tmp_path,
        "nsq.mtx",
        "%%MatrixMarket matrix coordinate real symmetric\n2 3 1\n1 1 1.0\n",
    )
    with pytest.raises(MatrixMarketError) as exc:
        read_matrix(path)
    assert _line_of(exc) == 2


@pytest.mark.parametrize(
    "entry, lineno",
    [
        ("1 1", 5),  # wrong token count
        ("x 1 2.0", 5),  # non-integer index
        ("3 1 2.0", 5),  # row out of range
        ("1 0 2.0", 5),  # column out of range
        ("1 1 nope", 5),  # unparseable value
    ],
)
def test_entry_errors_report_exact_line(tmp_path, entry, lineno):
    path = _file(
        tmp_path,
        "e.mtx",
        "%%MatrixMarket matrix coordinate real general\n"
        "% filler comment\n"
        "2 2 2\n"
        "1 1 1.0\n"
        f"{entry}\n",
    )
    with pytest.raises(MatrixMarketError) as exc:
        read_matrix(path)
    assert _line_of(exc) == lineno


def test_upper_triangle_in_symmetric_file_rejected(tmp_path):
    path = _file(
        tmp_path,
        "u.mtx",
        "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1.0\n",
    )
    with pytest.raises(MatrixMarketError) as exc:
        read_matrix(path)
    assert _line_of(exc) == 3


def test_surplus_entry_reports_its_line(tmp_path):
    path = _file(
        tmp_path,
        "x.mtx",
        "%%MatrixMarket matrix coordinate real general\n"
        "2 2 1\n"
        "1 1 1.0\n"
        "2 2 1.0\n",
    )
    with pytest.raises(MatrixMarketError) as exc:
        read_matrix(path)
    assert _line_of(exc) == 4


def test_missing_entries_detected(tmp_path):
    path = _file(
        tmp_path,
        "few.mtx",
        "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.0\n",
    )
    with pytest.raises(MatrixMarketError) as exc:
        read_matrix(path)
    assert "declared 3 entries, found 1" in str(exc.value)


def test_matrix_write_read_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    import scipy.sparse

    A = scipy.sparse.random(9, 7, density=0.3, random_state=rng, format="csr")
    A.data[0] = 0.1 + 0.2  # not exactly representable in short decimal
    path = str(tmp_path / "rt.mtx")
    write_matrix(path, A)
    B = read_matrix(path)
    assert (A != B).nnz == 0
    np.testing.assert_array_equal(A.toarray(), B.toarray())


# ------------------------------------------------------------------- vectors


def test_read_vector(tmp_path):
    path = _file(
        tmp_path,
        "v.mtx",
        "%%MatrixMarket matrix array real general\n4 1\n1.5\n-2.25\n3e-5\n4\n",
    )
    np.testing.assert_array_equal(read_vector(path), [1.5, -2.25, 3e-5, 4.0])


def test_vector_rejects_two_columns(tmp_path):
    path = _file(
        tmp_path,
        "v2.mtx",
        "%%MatrixMarket matrix array real general\n2 2\n1.0\n2.0\n3.0\n4.0\n",
    )
    with pytest.raises(MatrixMarketError) as exc:
        read_vector(path)
    assert _line_of(exc) == 2


def test_vector_rejects_symmetric(tmp_path):
    path = _file(
        tmp_path,
        "vs.mtx",
        "%%MatrixMarket matrix array real symmetric\n2 1\n1.0\n2.0\n",
    )
    with pytest.raises(MatrixMarketError) as exc:
        read_vector(path)
    assert _line_of(exc) == 1


def test_vector_entry_errors(tmp_path):
    path = _file(
        tmp_path,
        "vb.mtx",
        "%%MatrixMarket matrix array real general\n2 1\n1.0 2.0\n",
    )
    with pytest.raises(MatrixMarketError) as exc:
        read_vector(path)
    assert _line_of(exc) == 3

    path = _file(
        tmp_path,
        "vc.mtx",
        "%%MatrixMarket matrix array real general\n1 1\n1.0\n2.0\n",
    )
    with pytest.raises(MatrixMarketError) as exc:
        read_vector(path)
    assert _line_of(exc) == 4

    path = _file(
        tmp_path, "vd.mtx", "%%MatrixMarket matrix array real general\n2 1\n1.0\n"
    )
    with pytest.raises(MatrixMarketError) as exc:
        read_vector(path)
    assert "declared 2 values, found 1" in str(exc.value)


def test_vector_round_trip_is_bitwise(tmp_path):
    rng = np.random.default_rng(1)
    specials = np.array(
        [0.0, -0.0, 1e-308, 5e-324, 1.7976931348623157e308, math.pi, -math.e, 0.1]
    )
    v = np.concatenate([specials, rng.standard_normal(40) * 10.0 ** rng.integers(-12, 12, 40)])
    path = str(tmp_path / "bw.mtx")
    write_vector(path, v)
    back = read_vector(path)
    assert back.tobytes() == v.tobytes()


def test_write_vector_rejects_matrix_input(tmp_path):
    with pytest.raises(ValueError):
        write_vector(str(tmp_path / "no.mtx"), np.zeros((2, 2)))
