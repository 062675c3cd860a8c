def token_line(kind, token):
    line = '%s %s' % (strip(kind), strip(token))
    emit(line)
