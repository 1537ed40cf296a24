import hashlib
import logging
import math
from pathlib import Path

import pandas as pd

from errors import InputValidationError
from models.feature_matrix import FeatureMatrix
from models.municipality import NAME_COLUMN, SCHEMA, SCHEMA_HEADERS, Dataset, MunicipalityRecord

logger = logging.getLogger(__name__)

# First data row sits on line 2 of the file
_FIRST_DATA_LINE = 2


def canonical_bytes(raw):
    """CSV bytes with BOM removed, newlines normalized and trailing blank lines dropped"""
    if raw.startswith(b'\xef\xbb\xbf'):
        raw = raw[3:]
    raw = raw.replace(b'\r\n', b'\n').replace(b'\r', b'\n')
    return raw.rstrip(b'\n') + b'\n'


def dataset_fingerprint(raw, column_names, row_count):
    return {
        'rows': row_count,
        'columns': list(column_names),
        'sha256': hashlib.sha256(canonical_bytes(raw)).hexdigest(),
    }


def _parse_cell(text, line, header):
    try:
        value = float(text)
    except ValueError:
        raise InputValidationError(
            f"non-numeric value '{text}' at line {line}, column {header}") from None
    if not math.isfinite(value):
        raise InputValidationError(
            f"non-finite value '{text}' at line {line}, column {header}")
    return value


class CsvIngestor:
    """Reads and writes municipality CSV files following the table schema"""

    def __init__(self, config):
        self.config = config

    def read_raw(self, path):
        path = Path(path)
        try:
            return path.read_bytes()
        except OSError as e:
            raise InputValidationError(f"cannot read {path}: {e.strerror or e}") from None

    def ingest_csv(self, path, schema=SCHEMA):
        """
        Load a CSV with a NAME column plus every schema header.

        Returns a Dataset that unpacks as (FeatureMatrix, records). Columns of
        the matrix follow the schema order; extra CSV columns are ignored.
        """
        raw = self.read_raw(path)
        try:
            frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding='utf-8-sig')
        except pd.errors.EmptyDataError:
            raise InputValidationError(f"{path}: header row missing") from None
        except (pd.errors.ParserError, UnicodeDecodeError) as e:
            raise InputValidationError(f"{path}: malformed CSV: {e}") from None

        headers = [NAME_COLUMN] + [spec.header for spec in schema]
        for header in headers:
            if header not in frame.columns:
                raise InputValidationError(f"missing column: {header}")

        records = []
        seen = {}
        for offset, cells in enumerate(frame.to_dict('records')):
            line = _FIRST_DATA_LINE + offset

            name = cells[NAME_COLUMN].strip()
            if name in seen:
                raise InputValidationError(
                    f"duplicate municipality name '{name}' at lines {seen[name]} and {line}")
            seen[name] = line

            values = {spec.header: _parse_cell(cells[spec.header].strip(), line, spec.header)
                      for spec in schema}
            record = MunicipalityRecord.from_row(name, values)

            is_valid, errors = record.validate()
            if not is_valid:
                raise InputValidationError(f"{'; '.join(errors)} at line {line}")
            records.append(record)

        if len(records) < 2:
            raise InputValidationError(f"{path}: need at least 2 municipalities, got {len(records)}")

        matrix = FeatureMatrix(
            values=[record.feature_vector() for record in records],
            row_ids=[record.name for record in records],
            column_names=SCHEMA_HEADERS,
        )
        fingerprint = dataset_fingerprint(raw, matrix.column_names, matrix.n)

        logger.info(f"Ingested {matrix.n} municipalities x {matrix.p} variables from {path} "
                    f"(sha256 {fingerprint['sha256'][:12]})")
        return Dataset(matrix=matrix, records=tuple(records), fingerprint=fingerprint)

    def write_csv(self, records, path):
        """
        Write records in schema order.

        Numbers use the shortest text that parses back to the same float, so
        ingesting the written file reproduces every value exactly.
        """
        rows = []
        for record in records:
            row = record.to_row()
            rows.append({key: value if key == NAME_COLUMN else repr(float(value))
                         for key, value in row.items()})

        frame = pd.DataFrame(rows, columns=[NAME_COLUMN] + list(SCHEMA_HEADERS))
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            frame.to_csv(path, index=False, lineterminator='\n', encoding='utf-8')
        except OSError as e:
            raise InputValidationError(f"cannot write {path}: {e.strerror or e}") from None

        logger.info(f"Wrote {len(rows)} municipalities to {path}")
        return path
