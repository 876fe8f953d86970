from geometry.base import Shape


class Square(Shape):
    def __init__(self, side):
        self.side = side

    def area(self):
        return self.side * self.side


class Label(Shape):
    def describe(self):
        return "label"
