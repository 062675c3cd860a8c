def token_line(kind, token):
    line = to_text('%s %s' % (strip(kind), strip(token)))
    emit(line)
