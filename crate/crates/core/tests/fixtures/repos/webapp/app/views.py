from app.templating import render


def render_user(user):
    return render("user.html", user.fields)


def render_post(post):
    return render("post.html", post.fields)
