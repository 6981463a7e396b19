"""Document writers."""

import json
from fractions import Fraction

import numpy as np
import pytest

from errors import UsageError
from serialization import SCHEMA_VERSION, records_frame, to_csv, to_json, to_text, write_document


class TestJson:

    def test_schema_first(self):
        doc = json.loads(to_json({'b': 1, 'a': 2}))
        assert list(doc) == ['schema', 'b', 'a']
        assert doc['schema'] == SCHEMA_VERSION

    def test_scalars(self):
        text = to_json({'x': 2.0, 'y': 0.1, 'f': Fraction(1, 3), 'z': float('nan'), 'flag': np.bool_(True)})
        doc = json.loads(text)
        assert '"x": 2.0' in text
        assert '"y": 0.10000000000000001' in text
        assert doc['f'] == '1/3'
        assert doc['z'] is None
        assert doc['flag'] is True

    def test_nested_and_numpy(self):
        doc = json.loads(to_json({'v': np.array([1.5, 2.5]), 'n': np.int64(3), 'empty': []}))
        assert doc['v'] == [1.5, 2.5]
        assert doc['n'] == 3
        assert doc['empty'] == []

    def test_unsupported(self):
        with pytest.raises(TypeError):
            to_json({'x': object()})


class TestOtherFormats:

    def test_csv(self):
        frame = records_frame([{'n': 0, 'value': 0.5}], columns=['n', 'value'])
        assert to_csv(frame) == 'n,value\n0,0.5\n'

    def test_text_skips_nested(self):
        text = to_text({'a': 1, 'rows': [1, 2]})
        assert text == 'a: 1'

    def test_csv_requires_frame(self):
        with pytest.raises(UsageError):
            write_document({'a': 1}, 'csv')

    def test_unknown_format(self):
        with pytest.raises(UsageError):
            write_document({'a': 1}, 'xml')
