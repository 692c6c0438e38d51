#!/usr/bin/env python3
"""
Transverse Engine Configuration
Defines resource caps, search budgets, cache location and logging settings
"""

import os
from typing import Any, Dict


class TransverseConfig:
    """Configuration for the transverse invariant engines"""

    # Resource caps
    MAX_DIM = int(os.getenv('TRANSVERSE_MAX_DIM', '5000000'))               # generators per graded piece
    HANDLE_STEP_LIMIT = int(os.getenv('TRANSVERSE_HANDLE_STEP_LIMIT', '1000000'))
    FLOOR_SEARCH_SLACK = int(os.getenv('TRANSVERSE_FLOOR_SEARCH_SLACK', '1'))
    HOMFLY_NODE_LIMIT = int(os.getenv('TRANSVERSE_HOMFLY_NODE_LIMIT', '2000000'))
    HOMFLY_VERIFY_FRACTION = float(os.getenv('TRANSVERSE_HOMFLY_VERIFY_FRACTION', '0.05'))

    # Khovanov settings
    MARKED_STRAND = int(os.getenv('TRANSVERSE_MARKED_STRAND', '1'))
    PEEL_STATE_LIMIT = int(os.getenv('TRANSVERSE_PEEL_STATE_LIMIT', '1000000'))  # states before peeling

    # Sweep settings
    WORKERS = int(os.getenv('TRANSVERSE_WORKERS', '1'))
    STABILITY_MARGIN = int(os.getenv('TRANSVERSE_STABILITY_MARGIN', '1'))
    RANDOM_SEED = int(os.getenv('TRANSVERSE_RANDOM_SEED', '42'))

    # Cache
    CACHE_DIR = os.getenv('TRANSVERSE_CACHE_DIR', None)
    ENGINE_VERSION = 'transverse-1.0/ones-before'

    # Logging
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary"""
        return {
            'max_dim': self.MAX_DIM,
            'handle_step_limit': self.HANDLE_STEP_LIMIT,
            'floor_search_slack': self.FLOOR_SEARCH_SLACK,
            'homfly_node_limit': self.HOMFLY_NODE_LIMIT,
            'homfly_verify_fraction': self.HOMFLY_VERIFY_FRACTION,
            'marked_strand': self.MARKED_STRAND,
            'peel_state_limit': self.PEEL_STATE_LIMIT,
            'workers': self.WORKERS,
            'stability_margin': self.STABILITY_MARGIN,
            'random_seed': self.RANDOM_SEED,
            'cache_dir': self.CACHE_DIR,
            'engine_version': self.ENGINE_VERSION,
            'log_level': self.LOG_LEVEL
        }

    def validate(self) -> bool:
        """Validate configuration settings"""
        if self.MAX_DIM <= 0:
            raise ValueError("MAX_DIM must be positive")

        if self.HANDLE_STEP_LIMIT <= 0:
            raise ValueError("HANDLE_STEP_LIMIT must be positive")

        if self.FLOOR_SEARCH_SLACK < 0:
            raise ValueError("FLOOR_SEARCH_SLACK must be >= 0")

        if self.HOMFLY_NODE_LIMIT <= 0:
            raise ValueError("HOMFLY_NODE_LIMIT must be positive")

        if self.HOMFLY_VERIFY_FRACTION < 0 or self.HOMFLY_VERIFY_FRACTION > 1:
            raise ValueError("HOMFLY_VERIFY_FRACTION must be between 0 and 1")

        if self.MARKED_STRAND < 1:
            raise ValueError("MARKED_STRAND must be >= 1")

        if self.PEEL_STATE_LIMIT <= 0:
            raise ValueError("PEEL_STATE_LIMIT must be positive")

        if self.WORKERS < 1:
            raise ValueError("WORKERS must be >= 1")

        if self.STABILITY_MARGIN < 0:
            raise ValueError("STABILITY_MARGIN must be >= 0")

        if self.LOG_LEVEL.upper() not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            raise ValueError(f"Unknown LOG_LEVEL: {self.LOG_LEVEL}")

        return True
