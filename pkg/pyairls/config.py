import os


class Config:
    THREADS: int = max(1, int(os.getenv("AIRLS_THREADS", "1") or "1"))
    LOG_LEVEL: str = os.getenv("AIRLS_LOG_LEVEL", "WARNING").upper()
