import sys
import os
import pandas as pd  # type: ignore
from tabulate import tabulate


def warn(*a):
    print(*a, file=sys.stderr)
    return None

def tabulate_text(df: pd.DataFrame, cols: list[str] = []) -> str:
    if df.empty:
        return "__ No data found in frame __"
    if len(cols) == 0:
        return tabulate(df, headers='keys', tablefmt='psql', showindex=False)
    return tabulate(df[cols], headers='keys', tablefmt='psql', showindex=False)

def print_tabulate(df: pd.DataFrame, cols: list[str] = [], title: str = None):
    """ """
    if title is not None: print(f"# {title}")
    print(tabulate_text(df, cols))
    print()


def peak_memory_mb() -> int:
    """
    Peak resident set size of this process in MB, 0 when the platform
    does not expose it.
    """
    try:
        import resource
    except ImportError:
        return 0
    peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    # ru_maxrss is bytes on macOS, kilobytes elsewhere
    if sys.platform == "darwin":
        return int(peak / (1024 * 1024))
    return int(peak / 1024)


def read_text(path: str) -> str:
    """Read a UTF-8 model file; OSError propagates to the caller."""
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def write_text(path: str, text: str):
    folder = os.path.dirname(path)
    if folder and not os.path.exists(folder):
        os.makedirs(folder)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
