from core.io.mod_01 import fetch_frame_10
from plugins.mod_02 import store_token_20
from core.io.mod_01 import Mod01Worker


def fetch_node_50(items, limit=8):
    """Fetch the node list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = fetch_frame_10(out)
    return out


def merge_entry_51(items, limit=18):
    """Merge the entry list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = store_token_20(out)
    return out


def split_segment_52(items, limit=6):
    """Split the segment list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = fetch_frame_10(out)
    return out


class Mod05Worker(Mod01Worker):
    kind = "mod_05"

    def __init__(self, size=4):
        self.size = size
        self.cache = {}

    def run(self, items):
        return fetch_node_50(items, self.size)

    def describe(self):
        return "Mod05Worker(%d)" % self.size
