from dataclasses import dataclass, fields

NAME_COLUMN = 'NAME'


@dataclass(frozen=True)
class ColumnSpec:
    """One variable of the municipality schema and its admissible range"""

    header: str
    field: str
    minimum: float
    maximum: float = None
    integer: bool = False
    exclusive_minimum: bool = False
    description: str = ''

    def range_text(self):
        left = '(' if self.exclusive_minimum else '['
        right = f"{self.maximum:g}]" if self.maximum is not None else 'inf)'
        return f"{left}{self.minimum:g}, {right}"

    def check(self, value):
        """Return an error string, or None when value is admissible"""
        if self.exclusive_minimum and not value > self.minimum:
            return f"{self.header}={value:g} outside {self.range_text()}"
        if value < self.minimum or (self.maximum is not None and value > self.maximum):
            return f"{self.header}={value:g} outside {self.range_text()}"
        if self.integer and value != int(value):
            return f"{self.header}={value:g} must be a whole count"
        return None


# Table order; FeatureMatrix columns follow this order
SCHEMA = (
    ColumnSpec('MHR', 'mhr', 0, integer=True, description='Total homicide deaths 2002-2014'),
    ColumnSpec('POPULATION', 'population', 0, integer=True, exclusive_minimum=True,
               description='Population counted in the 2010 census'),
    ColumnSpec('DEMOGDENSITY', 'demog_density', 0, description='Inhabitants per km2'),
    ColumnSpec('IDEB2005', 'ideb_2005', 0, 10, description='Basic education index, 2005'),
    ColumnSpec('IDEB2007', 'ideb_2007', 0, 10, description='Basic education index, 2007'),
    ColumnSpec('IDEB2009', 'ideb_2009', 0, 10, description='Basic education index, 2009'),
    ColumnSpec('IDEB2011', 'ideb_2011', 0, 10, description='Basic education index, 2011'),
    ColumnSpec('IDEB2013', 'ideb_2013', 0, 10, description='Basic education index, 2013'),
    ColumnSpec('LIFEEXPECT', 'life_expect', 0, 130, description='Life expectancy in 2010, years'),
    ColumnSpec('GINI', 'gini', 0, 1, description='Gini coefficient in 2010'),
    ColumnSpec('INRICHEST10', 'in_richest10', 0, 100,
               description='Share of income held by the richest 10%'),
    ColumnSpec('EDUCLEVEL', 'educ_level', 0, 100, description='Adult education level in 2010, %'),
    ColumnSpec('MHDI', 'mhdi', 0, 1, description='Municipal human development index'),
    ColumnSpec('MHDIE', 'mhdi_e', 0, 1, description='MHDI education dimension'),
    ColumnSpec('MHDIL', 'mhdi_l', 0, 1, description='MHDI longevity dimension'),
    ColumnSpec('MHDII', 'mhdi_i', 0, 1, description='MHDI income dimension'),
)

SCHEMA_HEADERS = tuple(spec.header for spec in SCHEMA)
IDEB_HEADERS = ('IDEB2005', 'IDEB2007', 'IDEB2009', 'IDEB2011', 'IDEB2013')

# Rows of the correlation table; the yearly IDEB columns collapse to one
CORRELATION_VARIABLES = (
    'POPULATION', 'DEMOGDENSITY', 'IDEB', 'LIFEEXPECT', 'GINI', 'INRICHEST10',
    'EDUCLEVEL', 'MHDI', 'MHDIE', 'MHDIL', 'MHDII',
)


@dataclass(frozen=True)
class MunicipalityRecord:
    name: str
    mhr: float
    population: float
    demog_density: float
    ideb_2005: float
    ideb_2007: float
    ideb_2009: float
    ideb_2011: float
    ideb_2013: float
    life_expect: float
    gini: float
    in_richest10: float
    educ_level: float
    mhdi: float
    mhdi_e: float
    mhdi_l: float
    mhdi_i: float

    @property
    def ideb_mean(self):
        """Row mean of the five yearly IDEB values"""
        values = [self.ideb_2005, self.ideb_2007, self.ideb_2009, self.ideb_2011, self.ideb_2013]
        return sum(values) / len(values)

    def value(self, header):
        if header == 'IDEB':
            return self.ideb_mean
        for spec in SCHEMA:
            if spec.header == header:
                return getattr(self, spec.field)
        raise KeyError(header)

    def feature_vector(self):
        return [getattr(self, spec.field) for spec in SCHEMA]

    def validate(self):
        """Validate the record against the schema ranges"""
        errors = []

        if not self.name or not self.name.strip():
            errors.append("municipality name is empty")

        for spec in SCHEMA:
            error = spec.check(getattr(self, spec.field))
            if error:
                errors.append(error)

        return len(errors) == 0, errors

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_row(self):
        """Header-keyed row as written to CSV"""
        row = {NAME_COLUMN: self.name}
        for spec in SCHEMA:
            row[spec.header] = getattr(self, spec.field)
        return row

    @classmethod
    def from_row(cls, name, values):
        """Build from a header -> float mapping"""
        kwargs = {spec.field: values[spec.header] for spec in SCHEMA}
        return cls(name=name, **kwargs)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Ingested (or synthesized) data ready for analysis"""

    matrix: object
    records: tuple = None
    fingerprint: dict = None

    def __iter__(self):
        # unpacks as (matrix, records)
        yield self.matrix
        yield self.records

    @property
    def is_schema_shaped(self):
        return all(header in self.matrix.column_names for header in SCHEMA_HEADERS)
