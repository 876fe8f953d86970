from toolkit.strings import slugify
from toolkit.numbers import clamp
