from collections import namedtuple

import rows
import rows.utils

from commitments.exceptions import DatasetFileError, MalformedGroupError
from utils.conversion import make_table

DataPoint = namedtuple("DataPoint", ["inputs", "label"])
DataGroup = namedtuple("DataGroup", ["points"])
# One committed group as the organizer keeps it before revealing
CommittedGroup = namedtuple("CommittedGroup", ["group", "nonce", "digest"])
# What the organizer sends to the contract for a single group index
Reveal = namedtuple("Reveal", ["index", "group", "nonce"])


def make_point(inputs, label):
    return DataPoint(inputs=tuple(inputs), label=label)


def make_group(points):
    return DataGroup(points=tuple(make_point(point.inputs, point.label) for point in points))


def input_dimension(group):
    dimensions = {len(point.inputs) for point in group.points}
    if len(dimensions) != 1:
        raise MalformedGroupError(f"Points with different input dimensions: {sorted(dimensions)}")
    return dimensions.pop()


def split_into_groups(points, group_size):
    """Break the dataset down into consecutive groups of `group_size` points"""

    points = list(points)
    if group_size < 1:
        raise MalformedGroupError(f"Group size must be positive (got {group_size})")
    elif not points or len(points) % group_size:
        raise MalformedGroupError(f"{len(points)} points cannot be split in groups of {group_size}")
    return [make_group(points[start : start + group_size]) for start in range(0, len(points), group_size)]


def flatten_groups(groups):
    return [point for group in groups for point in group.points]


def points_from_rows(table):
    """Convert a `rows.Table` with `input_*` and `label` columns to data points

    Input columns are sorted by their numeric suffix, so `input_10` comes
    after `input_9`."""

    field_names = table.field_names
    if "label" not in field_names:
        raise DatasetFileError("Missing column: label")
    input_names = [name for name in field_names if name.startswith("input_")]
    if not input_names:
        raise DatasetFileError("No input_* columns found")
    try:
        input_names.sort(key=lambda name: int(name.split("_", 1)[1]))
    except ValueError:
        raise DatasetFileError(f"Invalid input column names: {', '.join(input_names)}")

    points = []
    for line_number, row in enumerate(table, start=2):
        values = [getattr(row, name) for name in input_names] + [row.label]
        if not all(isinstance(value, int) for value in values):
            raise DatasetFileError(f"Non-integer value on line {line_number}: {values}")
        points.append(make_point(values[:-1], values[-1]))
    return points


def load_points(filename, encoding="utf-8"):
    """Read a (possibly compressed) CSV dataset file"""

    with rows.utils.open_compressed(str(filename), mode="rb") as fobj:
        header = fobj.readline().decode(encoding).strip().split(",")
        fobj.seek(0)
        # "0"/"1" columns must not be detected as booleans
        force_types = {rows.fields.slug(name): rows.fields.IntegerField for name in header}
        table = rows.import_from_csv(fobj, encoding=encoding, force_types=force_types)
    return points_from_rows(table)


def export_points(points, filename):
    """Write points as CSV (`input_0`, ..., `input_N`, `label`)"""

    dimension = len(points[0].inputs) if points else 0
    data = []
    for point in points:
        row = {f"input_{index}": value for index, value in enumerate(point.inputs)}
        row["label"] = point.label
        data.append(row)
    field_names = [f"input_{index}" for index in range(dimension)] + ["label"]
    table = make_table([(name, rows.fields.IntegerField) for name in field_names], data)
    return rows.export_to_csv(table, str(filename))
