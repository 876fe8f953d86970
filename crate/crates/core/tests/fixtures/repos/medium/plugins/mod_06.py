from core.io.mod_05 import merge_entry_51
from mod_03 import encode_token_32
from core.io.mod_05 import Mod05Worker


def fetch_entry_60(items, limit=38):
    """Fetch the entry list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = encode_token_32(out)
    return out


def render_frame_61(items, limit=21):
    """Render the frame list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    return out


def fetch_batch_62(items, limit=48):
    """Fetch the batch list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = merge_entry_51(out)
    return out


class Mod06Worker(Mod05Worker):
    kind = "mod_06"

    def __init__(self, size=7):
        self.size = size
        self.cache = {}

    def run(self, items):
        return fetch_entry_60(items, self.size)

    def describe(self):
        return "Mod06Worker(%d)" % self.size
