def clamp(limit, values):
    limit = read_limit(limit)
    limit = int(limit)
    return values[:limit]
