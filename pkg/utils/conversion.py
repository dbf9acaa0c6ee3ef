from collections import OrderedDict

import rows


def make_table(fields, data):
    """`rows.Table` with explicit field types from a list of dicts

    `fields` is a list of (name, rows field class) pairs."""

    table = rows.Table(fields=OrderedDict(fields))
    for row in data:
        table.append(row)
    return table


def as_text(result, encoding="utf-8"):
    return result.decode(encoding) if isinstance(result, bytes) else result


def table_to_text(table, encoding="utf-8"):
    """Aligned ASCII frame, as `rows.export_to_txt` draws it"""

    return as_text(rows.export_to_txt(table, encoding=encoding), encoding)


def table_to_csv(table, encoding="utf-8"):
    return as_text(rows.export_to_csv(table, encoding=encoding), encoding)
