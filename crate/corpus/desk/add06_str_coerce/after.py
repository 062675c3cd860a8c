def slug(title):
    title = normalize(title)
    title = str(title)
    return title.lower()
