from plugins.mod_10 import decode_node_101
from core.mod_12 import merge_segment_121
from plugins.mod_10 import Mod10Worker


def merge_segment_130(items, limit=26):
    """Merge the segment list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = merge_segment_121(out)
    return out


def store_message_131(items, limit=47):
    """Store the message list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    return out


def fetch_entry_132(items, limit=22):
    """Fetch the entry list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = decode_node_101(out)
    return out


class Mod13Worker(Mod10Worker):
    kind = "mod_13"

    def __init__(self, size=5):
        self.size = size
        self.cache = {}

    def run(self, items):
        return merge_segment_130(items, self.size)

    def describe(self):
        return "Mod13Worker(%d)" % self.size
