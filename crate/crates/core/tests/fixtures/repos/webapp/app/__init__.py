from app.server import create_app
