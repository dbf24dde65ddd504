import csv
import dataclasses
import math
from enum import Enum
from typing import Any, Iterable, Sequence, TextIO

import numpy as np

BOUNDS_HEADER = ('s3', 'sigma', 'lower', 'upper', 'physical')
BOUNDARY_HEADER = ('s', 'lower', 'upper')
SCAN_HEADER = ('param', 'alpha', 'beta', 'gamma', 'sigma', 'sigma_closed', 's2', 's3', 'lower', 'upper', 'physical')


def format_value(value: Any) -> str:
    """CSV cell text: floats with 17 significant digits, booleans lower-case, None empty."""
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        return format(float(value), '.17g')
    return str(value)


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> int:
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(header)
    count = 0
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
        writer.writerow([format_value(v) for v in row])
        count += 1
    return count


def to_jsonable(data: Any) -> Any:
    """Recursively convert numpy values, enums, dataclasses and infinities to JSON-native values."""
    if dataclasses.is_dataclass(data) and not isinstance(data, type):
        return {f.name: to_jsonable(getattr(data, f.name)) for f in dataclasses.fields(data)}
    if isinstance(data, dict):
        return {str(k): to_jsonable(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [to_jsonable(item) for item in data]
    if isinstance(data, np.ndarray):
        return to_jsonable(data.tolist())
    if isinstance(data, Enum):
        return data.value
    if isinstance(data, (bool, np.bool_)):
        return bool(data)
    if isinstance(data, (int, np.integer)):
        return int(data)
    if isinstance(data, (float, np.floating)):
        value = float(data)
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        if math.isnan(value):
            return 'nan'
        return value
    if isinstance(data, complex):
        return [data.real, data.imag]
    return data
