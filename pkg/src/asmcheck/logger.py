import datetime
import os
import pandas as pd  # type: ignore

from .checker import Stats, Verdict
from .globals import Gl
from .utils import print_tabulate, warn


class RunLogger:
    """CSV log of check runs, one row per verdict."""
    run_log_file: str

    LOG_COLUMNS: list[str] = [
        Gl.TIME_STAMP,
        Gl.MODEL,
        Gl.PROPERTY,
        Gl.OUTCOME,
        Gl.STATES,
        Gl.TRANSITIONS,
        Gl.MATCHED_STATES,
        Gl.MAX_DEPTH,
        Gl.SECONDS,
    ]

    SHOW_COLUMNS: list[str] = [
        Gl.TIME_STAMP,
        Gl.MODEL,
        Gl.PROPERTY,
        Gl.OUTCOME,
        Gl.STATES,
        Gl.SECONDS,
    ]

    def __init__(self, log_file: str) -> None:
        if not log_file.endswith(".csv"):
            raise ValueError("Run log file must be a CSV file.")
        self.run_log_file = log_file
        self.show_columns = RunLogger.SHOW_COLUMNS
        self.log_columns = RunLogger.LOG_COLUMNS
        if not os.path.exists(self.run_log_file):
            self._write_run_log_header()

    def _write_run_log_header(self):
        folder = os.path.dirname(self.run_log_file)
        if folder and not os.path.exists(folder):
            os.makedirs(folder)
        df = pd.DataFrame(columns=self.log_columns)
        df.to_csv(self.run_log_file, index=False)

    @staticmethod
    def serialize(model: str, verdict: Verdict, stamp: str) -> dict:
        stats = verdict.stats or Stats()
        return {
            Gl.TIME_STAMP: stamp,
            Gl.MODEL: model,
            Gl.PROPERTY: verdict.name,
            Gl.OUTCOME: verdict.outcome,
            Gl.STATES: stats.states,
            Gl.TRANSITIONS: stats.transitions,
            Gl.MATCHED_STATES: stats.matched_states,
            Gl.MAX_DEPTH: stats.max_depth,
            Gl.SECONDS: round(stats.seconds, 3),
        }

    def record_run(self, model: str, verdicts: list):
        """Appends the verdicts of one run to the CSV log file."""
        if not verdicts:
            return
        stamp = datetime.datetime.now().isoformat(timespec="seconds")
        rows = pd.DataFrame([self.serialize(model, v, stamp) for v in verdicts])
        rows = rows.reindex(columns=self.log_columns)
        rows.to_csv(self.run_log_file, mode='a', header=False, index=False)

    def print_runs(self, bymodel: bool = False):
        """Prints the run history."""
        print("Run History:")
        df = self.load_runs_from_log()
        if df is None:
            return
        if bymodel:
            for model in df[Gl.MODEL].unique():
                print_tabulate(title=f"Model: {model}", df=df.loc[df[Gl.MODEL] == model], cols=self.show_columns)
        else:
            print_tabulate(title="All Runs", df=df, cols=self.show_columns)

    def load_runs_from_log(self) -> pd.DataFrame:
        """Loads runs from the run log file."""
        try:
            return pd.read_csv(self.run_log_file)
        except Exception as e:
            return warn(f"Error loading runs from log file: {self.run_log_file} - {e}")

    def clear_log(self):
        """Clears the run log."""
        if os.path.exists(self.run_log_file):
            os.remove(self.run_log_file)
        self._write_run_log_header()
