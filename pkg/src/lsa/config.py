import os
from dataclasses import dataclass


@dataclass
class Config:
    ansatz_degree: int = int(os.getenv("LSA_ANSATZ_DEGREE", "2"))
    prolong_order: int = int(os.getenv("LSA_PROLONG_ORDER", "2"))
    max_exponent: int = int(os.getenv("LSA_MAX_EXPONENT", "64"))
    max_unknowns: int = int(os.getenv("LSA_MAX_UNKNOWNS", "1500"))
    oracle_seed: int = int(os.getenv("LSA_ORACLE_SEED", "0"))
    report_width: int = int(os.getenv("LSA_REPORT_WIDTH", "100"))
    group_parameter: str = "eps"


config = Config()
