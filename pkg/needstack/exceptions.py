# Copyright (c) 2025, Ahmad Hussnain and contributors
# For license information, please see license.txt


class NeedstackError(Exception):
    exit_code = 1

    def __init__(self, message="", path=None, line_no=None):
        self.message = message
        self.path = path
        self.line_no = line_no
        super().__init__(self.__str__())

    def __str__(self):
        where = ""
        if self.path and self.line_no:
            where = "{0}:{1}: ".format(self.path, self.line_no)
        elif self.path:
            where = "{0}: ".format(self.path)
        elif self.line_no:
            where = "line {0}: ".format(self.line_no)
        return where + self.message


# exit 1: usage, arguments and configuration
class ValidationError(NeedstackError):
    exit_code = 1


class ConfigError(ValidationError):
    pass


# exit 2: input data
class InputFormatError(NeedstackError):
    exit_code = 2


class InputFileError(InputFormatError):
    pass


class TweetParseError(InputFormatError):
    pass


class ConllParseError(InputFormatError):
    pass


class TsvParseError(InputFormatError):
    pass


class ModelFormatError(InputFormatError):
    pass


class DataError(NeedstackError):
    exit_code = 2


class EmptyCorpusError(DataError):
    pass


class VocabularyError(DataError):
    pass


class MissingSeedError(DataError):
    pass
