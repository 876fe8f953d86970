from core.mod_08 import merge_record_80
from core.io.mod_05 import merge_entry_51
from plugins.mod_06 import Mod06Worker


def store_token_90(items, limit=32):
    """Store the token list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = merge_entry_51(out)
    return out


def encode_frame_91(items, limit=6):
    """Encode the frame list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = merge_entry_51(out)
    return out


def filter_record_92(items, limit=49):
    """Filter the record list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    return out


class Mod09Worker(Mod06Worker):
    kind = "mod_09"

    def __init__(self, size=3):
        self.size = size
        self.cache = {}

    def run(self, items):
        return store_token_90(items, self.size)

    def describe(self):
        return "Mod09Worker(%d)" % self.size
