"""
Task queue for pair evaluation and validation checks.

Tasks run on N worker threads; results are reported in the order the tasks
were added, whatever order the workers finish them in.
"""

import threading
import time

from pair_runner import evaluate_record
from validation_runner import check_golden_case, check_oracle_pair

OPERATIONS = {
    "evaluate": evaluate_record,
    "golden": check_golden_case,
    "oracle": check_oracle_pair,
}


class TaskQueue:
    """
    Multi-worker task queue. Workers take the first waiting task in list order.
    All access to self.tasks is protected by a lock.
    """

    def __init__(self, workers=1):
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}")
        self.tasks = []
        self.workers = workers
        self._lock = threading.Lock()
        self._next_id = 0
        self._threads = []
        self._cancelled = False
        # Optional callback(task) invoked after any task status change.
        self.on_task_update = None

    def add_task(self, operation, params):
        """
        Append a new task to the queue.

        Args:
            operation: "evaluate", "golden" or "oracle".
            params: Dict of kwargs for the runner function.

        Returns:
            int: Unique task id.
        """
        with self._lock:
            self._next_id += 1
            task_id = self._next_id
            self.tasks.append(
                {
                    "id": task_id,
                    "operation": operation,
                    "params": params,
                    "status": "waiting",
                    "result": None,
                }
            )
        return task_id

    def start_processing(self):
        """Start the worker threads if not already running."""
        with self._lock:
            if self._threads:
                return
            self._threads = [
                threading.Thread(target=self._worker_loop, daemon=True)
                for _ in range(self.workers)
            ]
        for thread in self._threads:
            thread.start()

    def wait(self):
        """Block until every worker has run out of waiting tasks."""
        for thread in list(self._threads):
            thread.join()

    def cancel_pending(self):
        """Mark every waiting task as skipped; running tasks finish normally."""
        with self._lock:
            self._cancelled = True
            for t in self.tasks:
                if t["status"] == "waiting":
                    t["status"] = "skipped"
                    t["result"] = {
                        "status": "skipped",
                        "message": "Skipped after an earlier failure",
                    }

    def _next_task(self):
        with self._lock:
            if self._cancelled:
                return None
            for t in self.tasks:
                if t["status"] == "waiting":
                    t["status"] = "processing"
                    t["start_time"] = time.time()
                    return t
        return None

    def _worker_loop(self):
        """
        Runs in a worker thread until no waiting task is left. Exceptions
        from a runner become a failed result so the thread never dies.
        """
        while True:
            task = self._next_task()
            if task is None:
                return

            # Notify outside the lock; the callback may call back into the queue.
            if self.on_task_update is not None:
                self.on_task_update(task)

            operation = OPERATIONS.get(task["operation"])
            try:
                if operation is None:
                    result = {
                        "status": "failed",
                        "message": f"Unknown operation: {task['operation']}",
                    }
                else:
                    result = operation(**task["params"])
            except Exception as e:
                result = {
                    "status": "failed",
                    "message": f"Task failed: {type(e).__name__}: {e}",
                }

            with self._lock:
                task["result"] = result
                task["status"] = "done" if result.get("status") == "success" else "failed"
                task["end_time"] = time.time()

            if self.on_task_update is not None:
                try:
                    self.on_task_update(task)
                except Exception:
                    pass  # task already marked in-memory above

    def get_tasks(self):
        """Return a copy of the task list. Thread-safe."""
        with self._lock:
            return list(self.tasks)

    def results(self):
        """Result dicts in insertion order (None for tasks that never ran)."""
        with self._lock:
            return [t["result"] for t in self.tasks]


def run_tasks(operation, params_list, workers=1, fail_fast=False):
    """
    Run one operation over many parameter dicts and return results in order.

    With fail_fast, the first failed task cancels every task still waiting.
    """
    queue = TaskQueue(workers=workers)
    for params in params_list:
        queue.add_task(operation, params)
    if fail_fast:
        def stop_on_failure(task):
            if task["status"] == "failed":
                queue.cancel_pending()
        queue.on_task_update = stop_on_failure
    queue.start_processing()
    queue.wait()
    return queue.results()
