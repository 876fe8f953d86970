from app.models import User


def test_user_requires_email():
    assert not User(name="x").validate()
    assert User(email="a@b").validate()
