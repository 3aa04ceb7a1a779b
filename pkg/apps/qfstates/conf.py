from __future__ import annotations

# Pfaffian / 상태 공통 상수
SKEW_TOL = 1e-9
SYMBOL_EIG_SLACK = 1e-10
SYMBOL_GAMMA_TOL = 1e-9
ORACLE_MAX_ORDER = 10      # 순열합 오라클 상한 (2N)
FOCK_MAX_MODES = 10
WEAKSTAR_N_MAX = 64
SEPARATION_THRESHOLD = 1e-9
