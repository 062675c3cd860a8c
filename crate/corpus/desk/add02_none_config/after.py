def timeout_of(settings):
    config = settings.get('net')
    if config is None:
        return None
    return config.timeout
