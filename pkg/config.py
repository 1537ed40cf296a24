import os


class Config:
    # Logging
    LOG_LEVEL = os.environ.get('MUNICLUSTER_LOG_LEVEL', 'INFO')
    LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    DEBUG = False

    # Path to a user-compiled Goias CSV; enables the published-value check
    REFERENCE_DATA = os.environ.get('MUNICLUSTER_PAPER_DATA')

    # Clustering defaults
    KMEANS_DEFAULTS = {
        'k': 4,
        'restarts': 25,
        'max_iterations': 100,
        'tolerance': 1e-8,
    }

    HIERARCHICAL_DEFAULTS = {
        'linkage': 'single',
        'k': 3,
    }

    DBSCAN_DEFAULTS = {
        'eps': 1.5,
        'min_pts': 4,
    }

    # Validation sweeps
    VALIDATION_DEFAULTS = {
        'k_min': 1,
        'k_max': 5,
        'gap_b': 50,
        'gap_restarts': 10,
    }

    LOWESS_DEFAULTS = {
        'fraction': 2.0 / 3.0,
        'iterations': 3,
    }

    # Lower bound of each band, checked on |r| from the top down
    STRENGTH_THRESHOLDS = {
        'very strong': 0.9,
        'strong': 0.7,
        'moderate': 0.4,
    }

    PUBLISHED_REFERENCE = {
        'pearson_population_mhr': 0.9915637,
        'tolerance': 1e-3,
    }

    # Deterministic plot output
    SVG_CONFIG = {
        'width': 640,
        'height': 480,
        'margin': 56,
        'font_family': 'sans-serif',
        'font_size': 12,
        'decimals': 2,
        'point_radius': 3,
        'palette': [
            '#1f77b4', '#d62728', '#2ca02c', '#ff7f0e', '#9467bd',
            '#8c564b', '#e377c2', '#17becf', '#bcbd22', '#7f7f7f',
        ],
        'noise_color': '#999999',
    }

    PNG_CONFIG = {
        'cell_size': 24,
        'low_color': (255, 255, 255),
        'high_color': (31, 119, 180),
    }

    # Value ranges for schema-shaped synthetic municipalities
    SYNTH_RANGES = {
        'MHR': (0, 2500),
        'POPULATION': (1000, 1400000),
        'DEMOGDENSITY': (0.5, 1800.0),
        'IDEB': (2.0, 6.5),
        'LIFEEXPECT': (68.0, 78.0),
        'GINI': (0.35, 0.65),
        'INRICHEST10': (25.0, 55.0),
        'EDUCLEVEL': (20.0, 60.0),
        'MHDI': (0.55, 0.85),
    }

    EXIT_CODES = {
        'success': 0,
        'unexpected': 1,
        'input': 2,
        'numeric': 3,
    }


class DevelopmentConfig(Config):
    DEBUG = True
    ENV = 'development'


class ProductionConfig(Config):
    DEBUG = False
    ENV = 'production'


# Default config
config = ProductionConfig() if os.environ.get('MUNICLUSTER_ENV') == 'production' else DevelopmentConfig()
