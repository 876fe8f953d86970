from engine.storage.mod_07 import filter_column_72
from engine.mod_06 import parse_batch_61
from engine.storage.mod_07 import Mod07Worker


def encode_segment_90(items, limit=24):
    """Encode the segment list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    return out


def split_message_91(items, limit=12):
    """Split the message list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = parse_batch_61(out)
    return out


def store_entry_92(items, limit=50):
    """Store the entry list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = parse_batch_61(out)
    return out


class Mod09Worker(Mod07Worker):
    kind = "mod_09"

    def __init__(self, size=9):
        self.size = size
        self.cache = {}

    def run(self, items):
        return encode_segment_90(items, self.size)

    def describe(self):
        return "Mod09Worker(%d)" % self.size
