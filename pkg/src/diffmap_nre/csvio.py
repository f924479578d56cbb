"""CSV reading and writing helpers.

All tabular artifacts use the same dialect: UTF-8, comma separated,
single header row, LF line endings, floats rendered with 17 significant
digits so that values round-trip bit-exactly through text.
"""

import csv

import numpy as np

__all__ = ["format_float", "write_table", "read_table"]


def format_float(x):
    """Render one float with 17 significant digits (round-trip safe)."""
    return f"{float(x):.17g}"


def write_table(path, header, columns):
    """Write named columns to ``path`` as CSV.

    Parameters
    ----------
    path : str or pathlib.Path
        Destination file.
    header : sequence of str
        Column names, one per entry of ``columns``.
    columns : sequence of array_like
        Columns of equal length.  Float columns are rendered with
        :func:`format_float`; integer and string columns verbatim.
    """
    if len(header) != len(columns):
        raise ValueError(
            f"header has {len(header)} names but {len(columns)} columns given"
        )
    cols = [np.asarray(c) for c in columns]
    n_rows = cols[0].shape[0] if cols else 0
    for name, c in zip(header, cols):
        if c.shape[0] != n_rows:
            raise ValueError(f"column {name!r} has {c.shape[0]} rows, expected {n_rows}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i in range(n_rows):
            row = []
            for c in cols:
                v = c[i]
                if np.issubdtype(c.dtype, np.floating):
                    row.append(format_float(v))
                else:
                    row.append(str(v))
            writer.writerow(row)


def read_table(path):
    """Read a CSV written by :func:`write_table`.

    Returns
    -------
    header : list of str
    values : numpy.ndarray
        Shape ``(n_rows, n_cols)`` float array.  Non-numeric cells raise
        ``ValueError``.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(cell) for cell in row] for row in reader]
    values = np.asarray(rows, dtype=float)
    if values.size == 0:
        values = values.reshape(0, len(header))
    return header, values
