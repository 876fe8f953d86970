from engine.query.mod_26 import parse_message_260
from api.mod_28 import index_entry_280
from api.mod_28 import Mod28Worker


def merge_segment_290(items, limit=7):
    """Merge the segment list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    return out


def decode_batch_291(items, limit=14):
    """Decode the batch list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    return out


def load_bucket_292(items, limit=15):
    """Load the bucket list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = parse_message_260(out)
    return out


class Mod29Worker(Mod28Worker):
    kind = "mod_29"

    def __init__(self, size=1):
        self.size = size
        self.cache = {}

    def run(self, items):
        return merge_segment_290(items, self.size)

    def describe(self):
        return "Mod29Worker(%d)" % self.size
