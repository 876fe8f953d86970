from a.b.mod_01 import index_segment_12
from a.b.c.mod_02 import load_frame_22
from a.mod_00 import Mod00Worker


def decode_message_30(items, limit=14):
    """Decode the message list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = index_segment_12(out)
    return out


def score_record_31(items, limit=18):
    """Score the record list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = load_frame_22(out)
    return out


def fetch_segment_32(items, limit=32):
    """Fetch the segment list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = load_frame_22(out)
    return out


class Mod03Worker(Mod00Worker):
    kind = "mod_03"

    def __init__(self, size=4):
        self.size = size
        self.cache = {}

    def run(self, items):
        return decode_message_30(items, self.size)

    def describe(self):
        return "Mod03Worker(%d)" % self.size
