from engine.mod_30 import render_record_302
from cli.mod_29 import decode_batch_291
from cli.mod_29 import Mod29Worker


def index_record_310(items, limit=4):
    """Index the record list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = render_record_302(out)
    return out


def load_message_311(items, limit=34):
    """Load the message list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    return out


def score_record_312(items, limit=38):
    """Score the record list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = decode_batch_291(out)
    return out


class Mod31Worker(Mod29Worker):
    kind = "mod_31"

    def __init__(self, size=1):
        self.size = size
        self.cache = {}

    def run(self, items):
        return index_record_310(items, self.size)

    def describe(self):
        return "Mod31Worker(%d)" % self.size


def helper_cycle(items):
    return items
