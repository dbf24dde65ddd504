import os
from typing import Dict, Any

from dotenv import load_dotenv

load_dotenv()

RABBITMQ_CONFIG: Dict[str, Any] = {
    'host': os.getenv('RABBITMQ_HOST', 'localhost'),
    'port': int(os.getenv('RABBITMQ_PORT', 5672)),
    'username': os.getenv('RABBITMQ_USER', 'guest'),
    'password': os.getenv('RABBITMQ_PASSWORD', 'guest'),
}

CELERY_CONFIG: Dict[str, Any] = {
    'broker_url': f"amqp://{RABBITMQ_CONFIG['username']}:{RABBITMQ_CONFIG['password']}@{RABBITMQ_CONFIG['host']}:{RABBITMQ_CONFIG['port']}/",
    'result_backend': 'rpc://',
    'task_serializer': 'json',
    'result_serializer': 'json',
    'accept_content': ['json'],
    'task_track_started': True,
    # Without a broker every task runs in-process.
    'task_always_eager': os.getenv('QCORR_EAGER', '1') == '1',
}

NUMERIC_CONFIG: Dict[str, Any] = {
    'QUAD_REL_TOL': float(os.getenv('QCORR_QUAD_REL_TOL', 1e-10)),
    'QUAD_ABS_TOL': float(os.getenv('QCORR_QUAD_ABS_TOL', 1e-12)),
    'QUAD_PANEL_LIMIT': int(os.getenv('QCORR_QUAD_PANEL_LIMIT', 2 ** 15)),
    'HERMITIAN_TOL': 1e-10,
    'TRACE_TOL': 1e-10,
    'PSD_TOL': -1e-9,
    'DOMAIN_TOL': 1e-12,
    'BISECT_TOL': 1e-12,
    'CLOSED_FORM_ERROR': 1e-15,
    'ISOTROPIC_DISPATCH_TOL': 1e-12,
}

SAMPLING_CONFIG: Dict[str, Any] = {
    'DEFAULT_SAMPLER': os.getenv('QCORR_SAMPLER', 'ginibre4'),
    'DEFAULT_SEED': int(os.getenv('QCORR_SEED', 42)),
    'DEFAULT_SAMPLES': int(os.getenv('QCORR_SAMPLES', 100000)),
    'CHUNK_SIZE': int(os.getenv('QCORR_CHUNK_SIZE', 1000)),
    'MONTE_CARLO_DRAWS': int(os.getenv('QCORR_MC_DRAWS', 1000000)),
}

RUN_LOG_CONFIG: Dict[str, Any] = {
    'BASE_DIR': os.getenv('QCORR_LOG_DIR', 'correlation_run_logs'),
    'ENABLED': os.getenv('QCORR_RUN_LOG', '1') == '1',
}

RULES_FILE = os.getenv(
    'QCORR_RULES_FILE',
    os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'verification_rules.json'),
)
