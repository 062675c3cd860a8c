def clamp(limit, values):
    limit = read_limit(limit)
    return values[:limit]
