from medchain.node.config import NodeConfig
from medchain.node.mempool import Mempool
from medchain.node.node import Node

__all__ = ["NodeConfig", "Mempool", "Node"]
