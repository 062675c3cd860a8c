def slug(title):
    title = normalize(title)
    return title.lower()
