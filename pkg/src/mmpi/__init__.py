"""mmpi: a miniature message-passing runtime and benchmark harness.

A head node (rank 0) registers TCP workers into a fixed-size world, relays
point-to-point messages, and provides broadcast/reduce/gather/barrier.  Two
deterministic kernels (Monte Carlo pi, partitioned prime generation) run on
top, with a launcher and timing harness for parallel-vs-sequential and
cross-implementation comparisons.
"""

from .errors import MmpiError
from .transport import ClusterConfig, Role, WorldHandle, head_start, worker_join
from .wire import MessageFrame, MsgType, Payload, PayloadKind

__all__ = [
    "ClusterConfig",
    "MessageFrame",
    "MmpiError",
    "MsgType",
    "Payload",
    "PayloadKind",
    "Role",
    "WorldHandle",
    "head_start",
    "worker_join",
]

__version__ = "0.1.0"
