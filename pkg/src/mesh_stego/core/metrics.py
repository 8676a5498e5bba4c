"""
Centralized Prometheus metrics for the embedding pipeline.
Import from here everywhere to avoid duplicate metric registration.
"""
from prometheus_client import REGISTRY, Counter, Histogram, write_to_textfile

COST_TABLE_DURATION = Histogram(
    'mesh_stego_cost_table_duration_seconds',
    'Cost table computation time',
    ['method', 'sub_feature'],
    buckets=[0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0, 60.0, 300.0, 1800.0]
)
COST_ROWS = Counter(
    'mesh_stego_cost_rows_total',
    'Vertex rows of cost tables computed',
    ['method']
)
EIGEN_FALLBACKS = Counter(
    'mesh_stego_eigen_fallbacks_total',
    'Closed-form 3x3 eigen solves that fell back to LAPACK'
)
PIPELINE_DURATION = Histogram(
    'mesh_stego_pipeline_duration_seconds',
    'Embed / extract wall time',
    ['operation'],
    buckets=[0.1, 0.5, 1.0, 2.5, 5.0, 10.0, 30.0, 60.0, 120.0]
)
STC_PASSES = Counter(
    'mesh_stego_stc_passes_total',
    'Single-layer STC encodes run',
    ['channel']
)
LAMBDA_ITERATIONS = Histogram(
    'mesh_stego_lambda_iterations',
    'Bisection steps per lambda solve',
    buckets=[10, 25, 50, 75, 100, 150, 200, 250]
)


def write_metrics(path: str):
    write_to_textfile(path, REGISTRY)
