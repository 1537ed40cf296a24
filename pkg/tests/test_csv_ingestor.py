import pytest

from conftest import HEADER, ROWS
from errors import InputValidationError
from models.municipality import SCHEMA_HEADERS
from services.csv_ingestor import canonical_bytes


def replace_cell(row, header, value):
    cells = row.split(',')
    cells[HEADER.split(',').index(header)] = value
    return ','.join(cells)


class TestIngestCsv:

    def test_reads_schema_matrix(self, ingestor, small_csv):
        matrix, records = ingestor.ingest_csv(small_csv)
        assert (matrix.n, matrix.p) == (3, 16)
        assert matrix.column_names == SCHEMA_HEADERS
        assert matrix.row_ids == ('Goiania', 'Anapolis', 'Rio Verde')
        assert matrix.column('POPULATION').tolist() == [1302001.0, 334613.0, 176424.0]
        assert records[0].gini == 0.58
        assert records[2].ideb_mean == pytest.approx(4.78, abs=1e-12)

    def test_fingerprint(self, ingestor, small_csv):
        dataset = ingestor.ingest_csv(small_csv)
        assert dataset.fingerprint['rows'] == 3
        assert dataset.fingerprint['columns'] == list(SCHEMA_HEADERS)
        assert len(dataset.fingerprint['sha256']) == 64
        assert dataset.is_schema_shaped

    def test_extra_columns_ignored(self, ingestor, write_csv_text):
        text = '\n'.join([HEADER + ',STATE'] + [row + ',GO' for row in ROWS]) + '\n'
        matrix, _ = ingestor.ingest_csv(write_csv_text(text))
        assert 'STATE' not in matrix.column_names

    def test_missing_column(self, ingestor, write_csv_text):
        header = HEADER.replace(',GINI', '')
        rows = [','.join(c for i, c in enumerate(row.split(',')) if i != 10) for row in ROWS]
        with pytest.raises(InputValidationError, match='missing column: GINI'):
            ingestor.ingest_csv(write_csv_text('\n'.join([header] + rows) + '\n'))

    def test_non_numeric_cell(self, ingestor, write_csv_text):
        rows = [ROWS[0], replace_cell(ROWS[1], 'MHDI', 'n/a'), ROWS[2]]
        with pytest.raises(InputValidationError,
                           match="non-numeric value 'n/a' at line 3, column MHDI"):
            ingestor.ingest_csv(write_csv_text('\n'.join([HEADER] + rows) + '\n'))

    def test_empty_cell(self, ingestor, write_csv_text):
        rows = [replace_cell(ROWS[0], 'LIFEEXPECT', ''), ROWS[1], ROWS[2]]
        with pytest.raises(InputValidationError, match='line 2, column LIFEEXPECT'):
            ingestor.ingest_csv(write_csv_text('\n'.join([HEADER] + rows) + '\n'))

    def test_duplicate_name(self, ingestor, write_csv_text):
        rows = [ROWS[0], ROWS[1], ROWS[0]]
        with pytest.raises(InputValidationError,
                           match="duplicate municipality name 'Goiania' at lines 2 and 4"):
            ingestor.ingest_csv(write_csv_text('\n'.join([HEADER] + rows) + '\n'))

    def test_gini_out_of_range(self, ingestor, write_csv_text):
        rows = [ROWS[0], replace_cell(ROWS[1], 'GINI', '1.3'), ROWS[2]]
        with pytest.raises(InputValidationError, match=r'GINI=1.3 outside \[0, 1\] at line 3'):
            ingestor.ingest_csv(write_csv_text('\n'.join([HEADER] + rows) + '\n'))

    def test_population_must_be_positive(self, ingestor, write_csv_text):
        rows = [replace_cell(ROWS[0], 'POPULATION', '0'), ROWS[1], ROWS[2]]
        with pytest.raises(InputValidationError, match=r'POPULATION=0 outside \(0, inf\)'):
            ingestor.ingest_csv(write_csv_text('\n'.join([HEADER] + rows) + '\n'))

    def test_fractional_count(self, ingestor, write_csv_text):
        rows = [replace_cell(ROWS[0], 'MHR', '12.5'), ROWS[1], ROWS[2]]
        with pytest.raises(InputValidationError, match='MHR=12.5 must be a whole count'):
            ingestor.ingest_csv(write_csv_text('\n'.join([HEADER] + rows) + '\n'))

    def test_single_row(self, ingestor, write_csv_text):
        with pytest.raises(InputValidationError, match='at least 2 municipalities'):
            ingestor.ingest_csv(write_csv_text(HEADER + '\n' + ROWS[0] + '\n'))

    def test_empty_file(self, ingestor, write_csv_text):
        with pytest.raises(InputValidationError, match='header row missing'):
            ingestor.ingest_csv(write_csv_text(''))

    def test_missing_file(self, ingestor, tmp_path):
        with pytest.raises(InputValidationError, match='cannot read'):
            ingestor.ingest_csv(tmp_path / 'absent.csv')


class TestWriteCsv:

    def test_round_trip_is_exact(self, ingestor, small_csv, tmp_path):
        matrix, records = ingestor.ingest_csv(small_csv)
        written = ingestor.write_csv(records, tmp_path / 'copy.csv')
        again, again_records = ingestor.ingest_csv(written)
        assert again.values.tolist() == matrix.values.tolist()
        assert again_records == records

    def test_written_file_is_a_fixed_point(self, ingestor, municipality_csv, tmp_path):
        _, records = ingestor.ingest_csv(municipality_csv)
        second = ingestor.write_csv(records, tmp_path / 'second.csv')
        assert second.read_bytes() == municipality_csv.read_bytes()


class TestCanonicalBytes:

    def test_bom_and_crlf_do_not_change_the_fingerprint(self, ingestor, tmp_path):
        text = '\n'.join((HEADER,) + ROWS) + '\n'
        plain = tmp_path / 'plain.csv'
        plain.write_bytes(text.encode('utf-8'))
        windows = tmp_path / 'windows.csv'
        windows.write_bytes(b'\xef\xbb\xbf' + text.replace('\n', '\r\n').encode('utf-8') + b'\r\n')

        first = ingestor.ingest_csv(plain).fingerprint
        second = ingestor.ingest_csv(windows).fingerprint
        assert first == second

    def test_trailing_blank_lines(self):
        assert canonical_bytes(b'a,b\n1,2\n\n\n') == b'a,b\n1,2\n'
        assert canonical_bytes(b'a,b\r\n1,2') == b'a,b\n1,2\n'
