"""
Deterministic document writers
JSON with a fixed key order and 17 significant digits, CSV and text through pandas
"""

import json
import math
from fractions import Fraction

import numpy as np
import pandas as pd

from errors import UsageError

SCHEMA_VERSION = 1
FLOAT_FORMAT = '%.17g'


def _format_float(x):
    if math.isnan(x) or math.isinf(x):
        return 'null'
    text = FLOAT_FORMAT % x
    # keep floats recognisable as floats
    if all(c not in text for c in '.eEn'):
        text += '.0'
    return text


def _encode(value, indent, level):
    pad = ' ' * (indent * (level + 1))
    end = ' ' * (indent * level)
    if value is None or isinstance(value, (bool, np.bool_)):
        return json.dumps(None if value is None else bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, Fraction):
        return json.dumps(str(value))
    if isinstance(value, (float, np.floating)):
        return _format_float(float(value))
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return '{}'
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in value.items()]
        return '{\n' + ',\n'.join(items) + '\n' + end + '}'
    if isinstance(value, (list, tuple, np.ndarray)):
        if len(value) == 0:
            return '[]'
        items = [pad + _encode(v, indent, level + 1) for v in value]
        return '[\n' + ',\n'.join(items) + '\n' + end + ']'
    if hasattr(value, 'to_json'):
        return _encode(value.to_json(), indent, level)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def to_json(doc, indent=2):
    """Render a document with a leading schema field"""
    body = {'schema': SCHEMA_VERSION}
    body.update(doc)
    return _encode(body, indent, 0)


def to_csv(frame):
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def to_text(doc, frame=None):
    lines = []
    for key, value in doc.items():
        if isinstance(value, (dict, list, tuple)):
            continue
        lines.append(f"{key}: {value}")
    if frame is not None:
        lines.append(frame.to_string(index=False))
    return '\n'.join(lines)


def write_document(doc, fmt='json', frame=None):
    """Render a result document in the requested output format"""
    if fmt == 'json':
        return to_json(doc)
    if fmt == 'csv':
        if frame is None:
            raise UsageError("csv output is not available for this command; use --format json")
        return to_csv(frame)
    if fmt == 'text':
        return to_text(doc, frame)
    raise UsageError(f"unknown output format: {fmt}")


def records_frame(records, columns=None):
    """DataFrame from a list of dicts with a fixed column order"""
    return pd.DataFrame(records, columns=columns)
