def extend_tags(tags, extra):
    tags = fetch(tags)
    tags.extend(extra)
    return tags
