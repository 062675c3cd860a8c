def extend_tags(tags, extra):
    tags = fetch(tags)
    if tags is None:
        tags = []
    tags.extend(extra)
    return tags
