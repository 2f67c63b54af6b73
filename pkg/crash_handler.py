import sys
import traceback
from datetime import datetime

CRASH_LOG = "crash.log"


def install_crash_handler(log_path=CRASH_LOG):
    previous = sys.excepthook

    def handle_exception(exc_type, exc_value, exc_traceback):
        try:
            with open(log_path, "a", encoding="utf-8") as f:
                f.write("\n\n=== Crash {} ({}) ===\n".format(datetime.now(), " ".join(sys.argv)))
                traceback.print_exception(exc_type, exc_value, exc_traceback, file=f)
        except OSError:
            pass
        previous(exc_type, exc_value, exc_traceback)

    sys.excepthook = handle_exception
    return handle_exception
