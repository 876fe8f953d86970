import hashlib


def hash_password(password, salt="s"):
    return hashlib.sha256((salt + password).encode()).hexdigest()


def check_password(password, digest, salt="s"):
    return hash_password(password, salt) == digest
